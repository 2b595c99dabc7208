#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpm/numeric.hpp"
#include "qpm/poling.hpp"

namespace qpm {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- domain sequence file ---------------------------------------------------
// Plain text: two header lines, then one "<sign> <width_nm>" pair per line.

inline void save_sequence(const DomainSequence& seq, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "# L_c_nm=" << format_double(seq.nominal_width_nm) << "\n";
    out << "# k0_rad_per_nm=" << format_double(seq.carrier_k) << "\n";
    for (const auto& d : seq.domains)
        out << d.sign << " " << format_double(d.width_nm) << "\n";
    write_text_file(path, out.str());
}

inline DomainSequence load_sequence(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("sequence file not found: " + path.string());
    DomainSequence seq;
    std::string line;
    bool have_lc = false, have_k0 = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            while (!key.empty() && key.front() == ' ') key.erase(key.begin());
            double value = std::strtod(line.c_str() + eq + 1, nullptr);
            if (key == "L_c_nm") { seq.nominal_width_nm = value; have_lc = true; }
            else if (key == "k0_rad_per_nm") { seq.carrier_k = value; have_k0 = true; }
            continue;
        }
        std::istringstream ls(line);
        int sign = 0;
        double width = 0.0;
        if (!(ls >> sign >> width))
            throw std::runtime_error("malformed sequence line: '" + line + "'");
        seq.domains.push_back(Domain{sign, width});
    }
    if (!have_lc || !have_k0)
        throw std::runtime_error("sequence file missing L_c_nm/k0_rad_per_nm headers: "
                                 + path.string());
    seq.validate();
    return seq;
}

// --- CSV ---------------------------------------------------------------------

/// Matrix CSV with axis header: cell (0,0) holds the axis label pair, row 0
/// the column axis, column 0 the row axis. Values at full double precision.
inline void write_matrix_csv(const std::filesystem::path& path, const std::string& axes_label,
                             const std::vector<double>& row_axis,
                             const std::vector<double>& col_axis,
                             const std::vector<double>& values) {
    if (values.size() != row_axis.size() * col_axis.size())
        throw std::invalid_argument("write_matrix_csv: size mismatch");
    std::ostringstream out;
    out << axes_label;
    for (double c : col_axis) out << "," << format_double(c);
    out << "\n";
    for (std::size_t r = 0; r < row_axis.size(); ++r) {
        out << format_double(row_axis[r]);
        for (std::size_t c = 0; c < col_axis.size(); ++c)
            out << "," << format_double(values[r * col_axis.size() + c]);
        out << "\n";
    }
    write_text_file(path, out.str());
}

struct MatrixCsv {
    std::string axes_label;
    std::vector<double> row_axis, col_axis, values;
};

inline MatrixCsv read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    MatrixCsv m;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path.string());
    {
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, m.axes_label, ',');
        while (std::getline(ls, cell, ',')) m.col_axis.push_back(std::strtod(cell.c_str(), nullptr));
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        m.row_axis.push_back(std::strtod(cell.c_str(), nullptr));
        while (std::getline(ls, cell, ','))
            m.values.push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (m.values.size() != m.row_axis.size() * m.col_axis.size())
        throw std::runtime_error("ragged csv: " + path.string());
    return m;
}

inline void write_trace_csv(const std::filesystem::path& path, const std::string& header,
                            const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("write_trace_csv: size mismatch");
    std::ostringstream out;
    out << header << "\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << format_double(x[i]) << "," << format_double(y[i]) << "\n";
    write_text_file(path, out.str());
}

// --- PPM heatmap ---------------------------------------------------------------
// Binary P6, row 0 at top, linear scaling to [min, max], 5-stop colormap
// interpolated componentwise (stops at t = 0, 1/4, 1/2, 3/4, 1).

inline void colormap_rgb(double t, unsigned char rgb[3]) {
    static const unsigned char stops[5][3] = {
        {13, 8, 135}, {126, 3, 168}, {204, 71, 120}, {248, 149, 64}, {240, 249, 33}};
    t = std::min(1.0, std::max(0.0, t));
    double x = t * 4.0;
    int lo = std::min(3, static_cast<int>(x));
    double f = x - lo;
    for (int c = 0; c < 3; ++c) {
        double v = stops[lo][c] + f * (stops[lo + 1][c] - stops[lo][c]);
        rgb[c] = static_cast<unsigned char>(std::lround(v));
    }
}

inline void write_heatmap_ppm(const std::filesystem::path& path,
                              const std::vector<double>& values, int rows, int cols) {
    if (values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw std::invalid_argument("write_heatmap_ppm: size mismatch");
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw std::invalid_argument("write_heatmap_ppm: non-finite value at index "
                                        + std::to_string(i));
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    const double range = hi > lo ? hi - lo : 1.0;
    std::string body;
    body.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 3);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            unsigned char rgb[3];
            colormap_rgb((values[static_cast<std::size_t>(r) * cols + c] - lo) / range, rgb);
            body.push_back(static_cast<char>(rgb[0]));
            body.push_back(static_cast<char>(rgb[1]));
            body.push_back(static_cast<char>(rgb[2]));
        }
    std::ostringstream out;
    out << "P6\n" << cols << " " << rows << "\n255\n" << body;
    write_text_file(path, out.str());
}

// --- output directory lock -------------------------------------------------------

/// Exclusive lock file guarding an output directory against concurrent runs.
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& dir) : path_(dir / ".qpm.lock") {
        std::filesystem::create_directories(dir);
        std::FILE* f = std::fopen(path_.string().c_str(), "wx");
        if (!f)
            throw std::runtime_error("output directory is locked by another run: "
                                     + dir.string());
        std::fclose(f);
    }
    ~OutputLock() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::filesystem::path path_;
};

} // namespace qpm
