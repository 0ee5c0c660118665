#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ymflow/harness.hpp"
#include "ymflow/io.hpp"

namespace ymflow {

namespace fs = std::filesystem;

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

std::string esc(const std::string& s) {
    std::string o;
    for (char ch : s) {
        if (ch == '<') o += "&lt;";
        else if (ch == '>') o += "&gt;";
        else if (ch == '&') o += "&amp;";
        else o += ch;
    }
    return o;
}

}  // namespace

std::string svg_lines(const std::string& title, const std::string& xlabel, const std::vector<Series>& series, bool logy) {
    const double W = 640, H = 400, ml = 70, mr = 150, mt = 30, mb = 45;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto ty = [&](double y) { return logy ? std::log10(y) : y; };
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.y[k]) || (logy && s.y[k] <= 0.0)) continue;
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, ty(s.y[k]));
            y1 = std::max(y1, ty(s.y[k]));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pw = W - ml - mr, ph = H - mt - mb;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return mt + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << esc(title) << "</text>\n";
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double X = ml + pw * k / 4.0, Y = mt + ph * (1.0 - k / 4.0);
        o << "<text x=\"" << X << "\" y=\"" << H - mb + 15 << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
        o << "<text x=\"" << ml - 5 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">" << (logy ? "1e" + num(fy) : num(fy)) << "</text>\n";
    }
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\">" << esc(xlabel) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* col = kPalette[s % 8];
        o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[s].x.size(); ++k) {
            if (!std::isfinite(series[s].y[k]) || (logy && series[s].y[k] <= 0.0)) continue;
            o << num(px(series[s].x[k])) << "," << num(py(series[s].y[k])) << " ";
        }
        o << "\"/>\n";
        const double ly = mt + 14 * (s + 1);
        o << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - mr + 30 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << W - mr + 35 << "\" y=\"" << ly << "\">" << esc(series[s].label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string svg_heatmap(const std::string& title, int nx, int ny, const std::vector<double>& v) {
    const double W = 520, H = 520, m = 40;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : v)
        if (std::isfinite(x)) lo = std::min(lo, x), hi = std::max(hi, x);
    if (!(hi > lo)) hi = lo + 1.0;
    const double cw = (W - 2 * m) / nx, ch = (H - 2 * m) / ny;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << esc(title) << " [" << num(lo)
      << ", " << num(hi) << "]</text>\n";
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double s = (v[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j] - lo) / (hi - lo);
            const int r = static_cast<int>(255 * s), b = static_cast<int>(255 * (1 - s)), g = static_cast<int>(255 * (1 - std::abs(2 * s - 1)));
            o << "<rect x=\"" << num(m + i * cw) << "\" y=\"" << num(H - m - (j + 1) * ch) << "\" width=\"" << num(cw + 0.3)
              << "\" height=\"" << num(ch + 0.3) << "\" fill=\"rgb(" << r << "," << g << "," << b << ")\"/>\n";
        }
    o << "</svg>\n";
    return o.str();
}

namespace {

void save(const fs::path& p, const std::string& s, int& count) {
    std::ofstream(p, std::ios::binary) << s;
    ++count;
    std::printf("wrote %s\n", p.string().c_str());
}

// groups rows by the value of `key`, plotting col against xcol
std::vector<Series> grouped(const CsvTable& t, const std::string& key, const std::string& xcol, const std::string& col,
                            const std::string& prefix) {
    std::map<double, Series> m;
    const int k = t.column(key), x = t.column(xcol), c = t.column(col);
    if (k < 0 || x < 0 || c < 0) return {};
    for (const auto& r : t.rows) {
        Series& s = m[r[k]];
        s.label = prefix + num(r[k]);
        s.x.push_back(r[x]);
        s.y.push_back(r[c]);
    }
    std::vector<Series> v;
    for (auto it = m.rbegin(); it != m.rend(); ++it) v.push_back(it->second);
    return v;
}

Series column(const CsvTable& t, const std::string& xcol, const std::string& col) {
    Series s;
    s.label = col;
    const int x = t.column(xcol), c = t.column(col);
    if (x < 0 || c < 0) return s;
    for (const auto& r : t.rows) {
        s.x.push_back(r[x]);
        s.y.push_back(r[c]);
    }
    return s;
}

}  // namespace

int cmd_report(const fs::path& root) {
    if (!fs::exists(root)) throw Rejected("report: '" + root.string() + "' does not exist");
    int count = 0;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
        const fs::path p = e.path();
        const std::string name = p.stem().string();
        const fs::path dir = p.parent_path();
        const CsvTable t = read_csv(p);
        if (t.rows.empty()) continue;
        if (name == "norms") {
            for (const char* c : {"l2", "sqrt_eps_h1", "energy", "visc_cum"})
                save(dir / ("norms_" + std::string(c) + ".svg"), svg_lines(std::string(c) + " per eps", "t", grouped(t, "eps", "t", c, "eps=")), count);
        } else if (name == "contraction") {
            save(dir / "contraction.svg", svg_lines("L2 distance of two solutions", "t", {column(t, "t", "distance")}), count);
        } else if (name == "equivalence") {
            save(dir / "equivalence.svg",
                 svg_lines("Young-measure limit vs strong solution", "t", {column(t, "t", "l2_distance"), column(t, "t", "flux_agreement")}),
                 count);
        } else if (name == "structural") {
            std::vector<Series> s;
            for (const char* c : {"support_violation_mass", "independence_l1", "jf_equality_gap_rel", "barycenter_interior"}) s.push_back(column(t, "t", c));
            save(dir / "structural.svg", svg_lines("structural residuals", "t", s, true), count);
        } else if (name == "envelope") {
            const int y = t.column("y");
            bool oned = true;
            for (const auto& r : t.rows) oned = oned && r[y] == 0.0;
            if (oned) save(dir / "envelope.svg", svg_lines("potential and envelope", "A", {column(t, "x", "phi"), column(t, "x", "env")}), count);
        } else if (name == "u_limit") {
            const int ti = t.column("t"), ii = t.column("i"), ji = t.column("j"), ui = t.column("u");
            int nx = 0, ny = 0;
            for (const auto& r : t.rows) nx = std::max(nx, static_cast<int>(r[ii]) + 1), ny = std::max(ny, static_cast<int>(r[ji]) + 1);
            if (ny == 1) {
                save(dir / "u_limit.svg", svg_lines("limit profile", "x", grouped(t, "t", "x", "u", "t=")), count);
            } else {
                const double tl = t.rows.back()[ti];
                std::vector<double> v(static_cast<std::size_t>(nx) * ny, 0.0);
                for (const auto& r : t.rows)
                    if (r[ti] == tl) v[static_cast<std::size_t>(r[ii]) + static_cast<std::size_t>(nx) * static_cast<std::size_t>(r[ji])] = r[ui];
                save(dir / "u_limit.svg", svg_heatmap("u at t=" + num(tl), nx, ny, v), count);
            }
        } else if (name == "strong_energy") {
            save(dir / "strong_energy.svg", svg_lines("strong solution energy", "t", {column(t, "t", "energy")}), count);
        }
    }
    if (count == 0) {
        std::fprintf(stderr, "report: no known CSV artifacts under %s\n", root.string().c_str());
        return 1;
    }
    return 0;
}

}  // namespace ymflow
