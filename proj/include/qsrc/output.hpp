#pragma once

// Scan and raster containers and their file formats.
//
// CSV: '#' header lines (key: value), then "x,y[,extra...]" rows with 17
// significant digits.  PGM: binary P5, 16-bit big-endian, scaled so the
// maximum maps to 65535, with a <name>.meta.json sidecar.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qsrc::output {

inline constexpr const char* version = "0.1.0";

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct Column {
    std::string label;
    std::vector<double> values;
};

struct ScanResult {
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<Column> extra;  ///< optional further columns on the same abscissa
    Metadata metadata;

    /// Throws DomainError unless x is strictly increasing and every value is finite.
    void validate() const;
    double peak() const;
};

struct RasterImage {
    int width = 0;
    int height = 0;
    double x_min = 0.0, x_max = 0.0;  ///< physical extent (m)
    double y_min = 0.0, y_max = 0.0;
    std::vector<double> values;       ///< row-major, row 0 at y_max
    Metadata metadata;

    void validate() const;
    double max_value() const;
};

/// Formats with 17 significant digits ("%.17g").
std::string format_number(double v);

void write_csv(const ScanResult& result, const std::filesystem::path& path);

/// Same content as write_csv as a JSON document.
void write_json(const ScanResult& result, const std::filesystem::path& path);

/// Parses a file written by write_csv (or any '#'-commented numeric CSV).
ScanResult read_csv(const std::filesystem::path& path);

/// Writes the PGM and returns the path of the JSON sidecar.
std::filesystem::path write_pgm(const RasterImage& image, const std::filesystem::path& path);

/// "<dir>/<stem>.meta.json" for an image path.
std::filesystem::path sidecar_path(const std::filesystem::path& image_path);

}  // namespace qsrc::output
