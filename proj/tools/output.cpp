#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "fracbubble/error.hpp"

namespace fbcli {

namespace fs = std::filesystem;

OutputDir::OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

void OutputDir::text(const std::string& name, const std::string& content) {
    std::ofstream os(root_ / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (root_ / name).string());
    os << content;
    if (!os) throw std::runtime_error("write failed for " + (root_ / name).string());
    files_.push_back(name);
}

void OutputDir::json(const std::string& name, const nlohmann::json& j) { text(name, j.dump(2) + "\n"); }

void OutputDir::field(const std::string& name, const fb::Field& u) {
    fb::write_binary(u, (root_ / name).string());
    files_.push_back(name);
}

void OutputDir::manifest(const std::string& command) {
    nlohmann::json m;
    m["command"] = command;
    m["files"] = nlohmann::json::array();
    for (const auto& f : files_)
        m["files"].push_back({{"path", f}, {"sha256", sha256_file(root_ / f)}, {"bytes", fs::file_size(root_ / f)}});
    std::ofstream os(root_ / "manifest.json", std::ios::binary);
    os << m.dump(2) << "\n";
    if (!os) throw std::runtime_error("cannot write manifest");
}

std::string sha256_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + p.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        if (is.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(is.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string rate_csv(const fb::RateReport& r) {
    std::ostringstream os;
    os << std::setprecision(17) << r.variable;
    for (const auto& c : r.columns) os << "," << c;
    os << "\n";
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        os << r.samples[i];
        for (const auto& col : r.measured) {
            os << ",";
            if (i < col.size() && std::isfinite(col[i])) os << col[i];
        }
        os << "\n";
    }
    return os.str();
}

namespace {

struct Axis {
    double lo, hi;
    double map(double v, double a, double b) const { return a + (std::log10(v) - lo) / (hi - lo) * (b - a); }
};

Axis log_axis(const std::vector<double>& v) {
    double lo = INFINITY, hi = -INFINITY;
    for (double x : v) {
        lo = std::min(lo, std::log10(x));
        hi = std::max(hi, std::log10(x));
    }
    if (hi - lo < 1e-6) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.08 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace

std::string rate_svg(const fb::RateReport& r) {
    const double W = 480, H = 360, L = 60, R = 20, T = 30, B = 50;
    std::ostringstream os;
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << L << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << r.name << ": slope "
       << r.slope << " (expected " << r.expected << ")</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (W + L - R) / 2 << "\" y=\"" << H - 12
       << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">log10 " << r.variable << "</text>\n";
    if (r.fit_x.size() >= 2 && r.fit_x.size() == r.fit_y.size()) {
        const Axis ax = log_axis(r.fit_x), ay = log_axis(r.fit_y);
        auto px = [&](double v) { return ax.map(v, L, W - R); };
        auto py = [&](double v) { return ay.map(v, H - B, T); };
        const double x0 = *std::min_element(r.fit_x.begin(), r.fit_x.end());
        const double x1 = *std::max_element(r.fit_x.begin(), r.fit_x.end());
        const fb::SlopeFit fit = fb::fit_log_slope(r.fit_x, r.fit_y);
        auto line = [&](double x) { return std::exp(fit.intercept + fit.slope * std::log(x)); };
        os << "<line x1=\"" << px(x0) << "\" y1=\"" << py(line(x0)) << "\" x2=\"" << px(x1) << "\" y2=\""
           << py(line(x1)) << "\" stroke=\"steelblue\"/>\n";
        for (std::size_t i = 0; i < r.fit_x.size(); ++i)
            os << "<circle cx=\"" << px(r.fit_x[i]) << "\" cy=\"" << py(r.fit_y[i]) << "\" r=\"3\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string heatmap_svg(const fb::Field& u, int max_cells) {
    const fb::Grid& g = u.grid;
    if (g.dim < 2) throw fb::DomainError("field", "heatmap needs a 2D or 3D field");
    const int nx = g.extents[0], ny = g.extents[1];
    const int zmid = g.dim == 3 ? g.extents[2] / 2 : 0;
    auto at = [&](int i, int j) {
        std::array<int, 3> idx{i, j, zmid};
        return u.values[g.flat(idx)];
    };
    const int step = std::max(1, (std::max(nx, ny) + max_cells - 1) / max_cells);
    double top = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) top = std::max(top, std::abs(at(i, j)));
    const int cx = (nx + step - 1) / step, cy = (ny + step - 1) / step;
    const int cell = std::max(1, 512 / std::max(cx, cy));
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cx * cell << "\" height=\"" << cy * cell << "\">\n";
    for (int a = 0; a < cx; ++a)
        for (int b = 0; b < cy; ++b) {
            const double v = top > 0.0 ? std::abs(at(a * step, b * step)) / top : 0.0;
            const int shade = 255 - static_cast<int>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
            // x₂ increases upward.
            os << "<rect x=\"" << a * cell << "\" y=\"" << (cy - 1 - b) * cell << "\" width=\"" << cell
               << "\" height=\"" << cell << "\" fill=\"rgb(" << shade << "," << shade << "," << shade << ")\"/>\n";
        }
    os << "</svg>\n";
    return os.str();
}

}  // namespace fbcli
