#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

#include "qsrc/errors.hpp"
#include "qsrc/output.hpp"
#include "qsrc/scenarios.hpp"

using namespace qsrc;
using namespace qsrc::output;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qsrc_test_output";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

ScanResult awkward_scan() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScanResult r;
    r.x_label = "E_J";
    r.y_label = "J_per_s";
    double x = -3.0e-25;
    for (int i = 0; i < 300; ++i) {
        x += std::ldexp(1.0 + std::fabs(u(rng)), -90);
        r.x.push_back(x);
        r.y.push_back(u(rng) * std::pow(10.0, 40.0 * u(rng)));
    }
    r.y[3] = 0.1;
    r.y[4] = std::numeric_limits<double>::denorm_min();
    r.y[5] = -0.0;
    r.y[6] = std::numeric_limits<double>::max();
    r.extra.push_back({"aux", r.y});
    r.metadata = {{"beta", "1.5e21"}, {"note", "two\nlines"}};
    return r;
}

struct Pgm {
    std::string magic;
    int width = 0, height = 0, maxval = 0;
    std::vector<std::uint16_t> samples;
};

Pgm read_pgm(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    Pgm g;
    f >> g.magic >> g.width >> g.height >> g.maxval;
    f.get();
    for (int i = 0; i < g.width * g.height; ++i) {
        const int hi = f.get(), lo = f.get();
        g.samples.push_back(static_cast<std::uint16_t>((hi << 8) | lo));
    }
    CHECK(f.good());
    f.get();
    CHECK(f.eof());
    return g;
}

}  // namespace

TEST_CASE("format_number keeps 17 significant digits") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-1.0 / 3.0) == "-0.33333333333333331");
}

TEST_CASE("CSV round trip is bit-exact") {
    const auto r = awkward_scan();
    const auto path = scratch("roundtrip.csv");
    write_csv(r, path);
    const auto back = read_csv(path);
    REQUIRE(back.x.size() == r.x.size());
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        CHECK(back.x[i] == r.x[i]);
        CHECK(back.y[i] == r.y[i]);
        CHECK(std::signbit(back.y[i]) == std::signbit(r.y[i]));
    }
    REQUIRE(back.extra.size() == 1);
    CHECK(back.extra[0].label == "aux");
    CHECK(back.extra[0].values == r.extra[0].values);
    CHECK(back.x_label == "E_J");
    CHECK(back.y_label == "J_per_s");
}

TEST_CASE("CSV layout: header, separators, line endings") {
    const auto r = awkward_scan();
    const auto path = scratch("layout.csv");
    write_csv(r, path);
    const std::string text = slurp(path);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.rfind(std::string("# qsrc ") + version + "\n", 0) == 0);
    CHECK(text.find("# beta: 1.5e21\n") != std::string::npos);
    CHECK(text.find("# note: two lines\n") != std::string::npos);
    CHECK(text.find("# columns: E_J,J_per_s,aux\n") != std::string::npos);
    std::istringstream in(text);
    std::string line;
    int data = 0;
    while (std::getline(in, line)) {
        if (line[0] == '#') {
            CHECK(data == 0);
            continue;
        }
        ++data;
        CHECK(std::count(line.begin(), line.end(), ',') == 2);
    }
    CHECK(data == 300);
}

TEST_CASE("CSV writes are deterministic") {
    const auto r = awkward_scan();
    write_csv(r, scratch("a.csv"));
    write_csv(r, scratch("b.csv"));
    CHECK(slurp(scratch("a.csv")) == slurp(scratch("b.csv")));
}

TEST_CASE("scan header records the scaled parameters") {
    auto p = scenarios::rb_atom_laser();
    const auto c = scenarios::atom_laser_depletion(p, scenarios::linspace(-1e3, 1e3, 5));
    const auto path = scratch("depletion.csv");
    write_csv(c.to_scan(p), path);
    const auto back = read_csv(path);
    auto find = [&](const std::string& k) {
        for (const auto& [key, v] : back.metadata) if (key == k) return v;
        return std::string();
    };
    const auto sys = p.system();
    REQUIRE_FALSE(find("beta_per_J").empty());
    CHECK(std::stod(find("beta_per_J")) == sys.beta());
    REQUIRE_FALSE(find("alpha").empty());
    CHECK(std::stod(find("alpha")) == sys.scale_length(p.width));
}

TEST_CASE("JSON output carries the same data") {
    const auto r = awkward_scan();
    const auto path = scratch("scan.json");
    write_json(r, path);
    std::ifstream f(path);
    const auto j = nlohmann::json::parse(f);
    CHECK(j["x_label"] == "E_J");
    const auto x = j["x"].get<std::vector<double>>();
    CHECK(x == r.x);
    CHECK(j["extra"]["aux"].get<std::vector<double>>().size() == r.x.size());
    CHECK(j["metadata"]["beta"] == "1.5e21");
}

TEST_CASE("scan validation rejects NaN and non-increasing abscissae") {
    ScanResult r;
    r.x = {0.0, 1.0, 1.0};
    r.y = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(r.validate(), DomainError);
    CHECK_THROWS_AS(write_csv(r, scratch("bad.csv")), DomainError);
    r.x = {0.0, 1.0, 2.0};
    r.y[1] = std::nan("");
    CHECK_THROWS_AS(r.validate(), DomainError);
    r.y = {1.0, 2.0};
    CHECK_THROWS_AS(r.validate(), DomainError);
}

TEST_CASE("unwritable paths raise IoError") {
    ScanResult r;
    r.x = {0.0, 1.0};
    r.y = {1.0, 2.0};
    const fs::path bad = scratch("no_such_dir") / "deeper" / "x.csv";
    CHECK_THROWS_AS(write_csv(r, bad), IoError);
    RasterImage img;
    img.width = img.height = 1;
    img.values = {1.0};
    CHECK_THROWS_AS(write_pgm(img, scratch("no_such_dir") / "deeper" / "x.pgm"), IoError);
    CHECK_THROWS_AS(read_csv(bad), IoError);
}

TEST_CASE("PGM header, scaling and sidecar") {
    RasterImage img;
    img.width = 3;
    img.height = 2;
    img.x_min = -1e-3;
    img.x_max = 1e-3;
    img.y_min = -0.5e-3;
    img.y_max = 0.5e-3;
    img.values = {0.0, 1.0, 2.0, 4.0, 3.0, 0.5};
    img.metadata = {{"species", "O-"}};
    const auto path = scratch("tiny.pgm");
    const auto side = write_pgm(img, path);
    CHECK(side == scratch("tiny.meta.json"));

    const auto g = read_pgm(path);
    CHECK(g.magic == "P5");
    CHECK(g.width == 3);
    CHECK(g.height == 2);
    CHECK(g.maxval == 65535);
    const std::vector<std::uint16_t> expect{0, 16384, 32768, 65535, 49151, 8192};
    CHECK(g.samples == expect);

    std::ifstream f(side);
    const auto j = nlohmann::json::parse(f);
    CHECK(j["normalization"]["max_value"].get<double>() == 4.0);
    CHECK(j["normalization"]["all_zero"] == false);
    CHECK(j["extent_m"]["x_min"].get<double>() == -1e-3);
    CHECK(j["extent_m"]["y_max"].get<double>() == 0.5e-3);
    CHECK(j["parameters"]["species"] == "O-");
}

TEST_CASE("all-zero image writes zero pixels and a guarded normalization") {
    RasterImage img;
    img.width = img.height = 4;
    img.values.assign(16, 0.0);
    const auto path = scratch("zero.pgm");
    const auto side = write_pgm(img, path);
    const auto g = read_pgm(path);
    for (auto s : g.samples) CHECK(s == 0);
    std::ifstream f(side);
    const auto j = nlohmann::json::parse(f);
    CHECK(j["normalization"]["max_value"].get<double>() == 0.0);
    CHECK(j["normalization"]["all_zero"] == true);
}

TEST_CASE("raster validation") {
    RasterImage img;
    CHECK_THROWS_AS(img.validate(), DomainError);
    img.width = img.height = 2;
    img.values = {0.0, 1.0, 2.0};
    CHECK_THROWS_AS(img.validate(), DomainError);
    img.values = {0.0, 1.0, -2.0, 0.0};
    CHECK_THROWS_AS(img.validate(), DomainError);
    CHECK_THROWS_AS(write_pgm(img, scratch("neg.pgm")), DomainError);
}

TEST_CASE("sidecar path replaces the extension") {
    CHECK(sidecar_path("out/rings.pgm") == fs::path("out/rings.meta.json"));
    CHECK(sidecar_path("rings") == fs::path("rings.meta.json"));
}

TEST_CASE("PGM writes are deterministic") {
    const auto img = scenarios::detector_image(scenarios::o_minus(), 64);
    write_pgm(img, scratch("d1.pgm"));
    write_pgm(img, scratch("d2.pgm"));
    CHECK(slurp(scratch("d1.pgm")) == slurp(scratch("d2.pgm")));
    CHECK(slurp(scratch("d1.meta.json")) == slurp(scratch("d2.meta.json")));
}
