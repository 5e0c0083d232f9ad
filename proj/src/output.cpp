#include "qsrc/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "qsrc/errors.hpp"

namespace qsrc::output {

namespace {

void require_finite(const std::vector<double>& v, const std::string& what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw DomainError(what + ": non-finite value");
    }
}

// Header values must stay on one line.
std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ScanResult::validate() const {
    if (x.size() != y.size()) throw DomainError("scan: abscissa and values differ in length");
    for (const auto& c : extra) {
        if (c.values.size() != x.size()) {
            throw DomainError("scan: column '" + c.label + "' differs in length");
        }
        require_finite(c.values, "scan column '" + c.label + "'");
    }
    require_finite(x, "scan abscissa");
    require_finite(y, "scan values");
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw DomainError("scan: abscissa is not strictly increasing");
    }
}

double ScanResult::peak() const {
    return y.empty() ? 0.0 : *std::max_element(y.begin(), y.end());
}

void RasterImage::validate() const {
    if (width <= 0 || height <= 0) throw DomainError("raster: dimensions must be positive");
    if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw DomainError("raster: value count does not match dimensions");
    }
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) throw DomainError("raster: intensities must be finite and >= 0");
    }
}

double RasterImage::max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

void write_csv(const ScanResult& result, const std::filesystem::path& path) {
    result.validate();
    std::ostringstream out;
    out << "# qsrc " << version << '\n';
    for (const auto& [k, v] : result.metadata) out << "# " << one_line(k) << ": " << one_line(v) << '\n';
    out << "# columns: " << one_line(result.x_label) << ',' << one_line(result.y_label);
    for (const auto& c : result.extra) out << ',' << one_line(c.label);
    out << '\n';
    for (std::size_t i = 0; i < result.x.size(); ++i) {
        out << format_number(result.x[i]) << ',' << format_number(result.y[i]);
        for (const auto& c : result.extra) out << ',' << format_number(c.values[i]);
        out << '\n';
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    const std::string s = out.str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw IoError("write to '" + path.string() + "' failed");
}

void write_json(const ScanResult& result, const std::filesystem::path& path) {
    result.validate();
    nlohmann::ordered_json j;
    j["generator"] = std::string("qsrc ") + version;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : result.metadata) meta[k] = v;
    j["metadata"] = meta;
    j["x_label"] = result.x_label;
    j["y_label"] = result.y_label;
    j["x"] = result.x;
    j["y"] = result.y;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();
    for (const auto& c : result.extra) extra[c.label] = c.values;
    j["extra"] = extra;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << j.dump(1) << '\n';
    if (!f) throw IoError("write to '" + path.string() + "' failed");
}

ScanResult read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    ScanResult r;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.substr(std::min<std::size_t>(2, line.size()));
            const auto colon = body.find(": ");
            if (colon == std::string::npos) continue;
            const std::string key = body.substr(0, colon), value = body.substr(colon + 2);
            if (key == "columns") {
                std::stringstream ss(value);
                std::string label;
                std::vector<std::string> labels;
                while (std::getline(ss, label, ',')) labels.push_back(label);
                if (!labels.empty()) r.x_label = labels[0];
                if (labels.size() > 1) r.y_label = labels[1];
                for (std::size_t i = 2; i < labels.size(); ++i) r.extra.push_back({labels[i], {}});
            } else {
                r.metadata.emplace_back(key, value);
            }
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ',')) {
            // strtod rather than stod: subnormals must parse, not throw.
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || cell.find_first_not_of(" \t\r", end - cell.c_str()) != std::string::npos) {
                throw IoError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" +
                              cell + "'");
            }
            cells.push_back(v);
        }
        if (cells.size() < 2) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected at least two columns");
        }
        r.x.push_back(cells[0]);
        r.y.push_back(cells[1]);
        for (std::size_t i = 2; i < cells.size(); ++i) {
            if (i - 2 >= r.extra.size()) r.extra.push_back({"column" + std::to_string(i), {}});
            r.extra[i - 2].values.push_back(cells[i]);
        }
    }
    return r;
}

std::filesystem::path sidecar_path(const std::filesystem::path& image_path) {
    auto p = image_path;
    p.replace_extension(".meta.json");
    return p;
}

std::filesystem::path write_pgm(const RasterImage& image, const std::filesystem::path& path) {
    image.validate();
    const double peak = image.max_value();
    const double scale = peak > 0.0 ? 65535.0 / peak : 0.0;

    std::string data = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                       "\n65535\n";
    data.reserve(data.size() + 2 * image.values.size());
    for (double v : image.values) {
        const auto q = static_cast<std::uint16_t>(std::lround(std::min(65535.0, v * scale)));
        data.push_back(static_cast<char>(q >> 8));
        data.push_back(static_cast<char>(q & 0xff));
    }
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
        f.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!f) throw IoError("write to '" + path.string() + "' failed");
    }

    nlohmann::ordered_json meta;
    meta["generator"] = std::string("qsrc ") + version;
    meta["width"] = image.width;
    meta["height"] = image.height;
    meta["extent_m"] = {{"x_min", image.x_min}, {"x_max", image.x_max},
                        {"y_min", image.y_min}, {"y_max", image.y_max}};
    meta["normalization"] = {{"max_value", peak}, {"full_scale", 65535},
                             {"all_zero", peak == 0.0}};
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : image.metadata) params[k] = v;
    meta["parameters"] = params;

    const auto side = sidecar_path(path);
    std::ofstream f(side, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + side.string() + "' for writing");
    f << meta.dump(2) << '\n';
    if (!f) throw IoError("write to '" + side.string() + "' failed");
    return side;
}

}  // namespace qsrc::output
