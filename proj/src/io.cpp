#include "spect/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace spect {

std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

void write_values(std::ofstream& out, std::span<const double> values) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 8));
    } else {
        for (double v : values) {
            auto bits = std::bit_cast<std::uint64_t>(v);
            char bytes[8];
            for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
            out.write(bytes, 8);
        }
    }
}

std::vector<double> read_values(std::ifstream& in, std::size_t count, const std::string& where) {
    std::vector<char> raw(count * 8);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw FormatError(where + ": payload is truncated");
    in.peek();
    if (!in.eof()) throw FormatError(where + ": trailing bytes after payload");
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i * 8 + b])) << (8 * b);
        values[i] = std::bit_cast<double>(bits);
    }
    return values;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    return out;
}

std::istringstream header_line(std::ifstream& in, const std::string& magic, const std::string& where) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError(where + ": missing header");
    std::istringstream hs(line);
    std::string tag;
    hs >> tag;
    if (tag != magic) throw FormatError(where + ": expected " + magic + " header");
    return hs;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw FormatError("write failed for " + path.string());
}

}  // namespace

void write_field(const std::filesystem::path& path, const ScalarField& g) {
    auto out = open_output(path);
    const std::string L = format_real(g.spec().half_width);
    const std::string mL = format_real(-g.spec().half_width);
    out << "SPFLD " << g.n() << ' ' << g.n() << ' ' << mL << ' ' << L << ' ' << mL << ' ' << L << '\n';
    write_values(out, g.values());
    finish(out, path);
}

ScalarField read_field(const std::filesystem::path& path) {
    const std::string where = "field file " + path.string();
    auto in = open_input(path);
    auto hs = header_line(in, "SPFLD", where);
    int rows = 0, cols = 0;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    if (!(hs >> rows >> cols >> xmin >> xmax >> ymin >> ymax)) throw FormatError(where + ": malformed header");
    if (rows != cols || rows < 8) throw FormatError(where + ": only square grids with n >= 8 are supported");
    if (!(xmax > 0.0) || xmin != -xmax || ymin != -ymax || ymax != xmax)
        throw FormatError(where + ": domain must be a centered square [-L, L]^2");
    const GridSpec spec(rows, xmax);
    return ScalarField(spec, read_values(in, spec.size(), where));
}

void write_sinogram(const std::filesystem::path& path, const Sinogram& s) {
    auto out = open_output(path);
    out << "SPSIN " << s.n_s() << ' ' << s.n_theta() << ' ' << format_real(-s.spec().half_width) << ' '
        << format_real(s.spec().half_width) << '\n';
    write_values(out, s.values());
    finish(out, path);
}

Sinogram read_sinogram(const std::filesystem::path& path) {
    const std::string where = "sinogram file " + path.string();
    auto in = open_input(path);
    auto hs = header_line(in, "SPSIN", where);
    int n_s = 0, n_theta = 0;
    double smin = 0, smax = 0;
    if (!(hs >> n_s >> n_theta >> smin >> smax)) throw FormatError(where + ": malformed header");
    if (n_s < 8 || n_theta < 1) throw FormatError(where + ": bad dimensions");
    if (!(smax > 0.0) || smin != -smax) throw FormatError(where + ": s range must be [-L, L]");
    const GridSpec spec(n_s, smax);
    const AngleSet angles(n_theta);
    return Sinogram(spec, angles, read_values(in, static_cast<std::size_t>(n_s) * n_theta, where));
}

Image field_image(const ScalarField& g, bool crop_unit_square) {
    const GridSpec& spec = g.spec();
    int lo = 0, hi = spec.n;
    if (crop_unit_square) {
        while (lo < spec.n && spec.coord(lo) < -1.0) ++lo;
        while (hi > lo && spec.coord(hi - 1) > 1.0) --hi;
    }
    Image img{hi - lo, hi - lo, {}};
    img.values.reserve(static_cast<std::size_t>(img.rows) * img.cols);
    for (int i = hi - 1; i >= lo; --i)
        for (int j = lo; j < hi; ++j) img.values.push_back(g(i, j));
    return img;
}

Image sinogram_image(const Sinogram& s) {
    Image img{s.n_s(), s.n_theta(), {}};
    img.values.reserve(s.values().size());
    for (int i = s.n_s() - 1; i >= 0; --i)
        for (int k = 0; k < s.n_theta(); ++k) img.values.push_back(s(i, k));
    return img;
}

void write_pgm(const std::filesystem::path& path, const Image& image) {
    if (image.rows <= 0 || image.cols <= 0) throw FormatError("write_pgm: empty image");
    const auto [lo_it, hi_it] = std::minmax_element(image.values.begin(), image.values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
    auto out = open_output(path);
    out << "P5\n# min " << format_real(lo) << " max " << format_real(hi) << '\n'
        << image.cols << ' ' << image.rows << "\n65535\n";
    std::vector<char> bytes;
    bytes.reserve(image.values.size() * 2);
    for (double v : image.values) {
        const auto q = static_cast<std::uint16_t>(std::clamp(std::round((v - lo) * scale), 0.0, 65535.0));
        bytes.push_back(static_cast<char>(q >> 8));
        bytes.push_back(static_cast<char>(q & 0xff));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    finish(out, path);
}

}  // namespace spect
