#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "phstring/io.hpp"

namespace phs {

namespace {

struct Series {
    const char* label;
    const char* color;
    const char* dash;  // nullptr for solid
    std::vector<double> values;
};

struct Panel {
    double x0, y0, w, h;
    double tmin, tmax, vmin, vmax;

    double sx(double t) const { return x0 + (t - tmin) / (tmax - tmin) * w; }
    double sy(double v) const { return y0 + h - (v - vmin) / (vmax - vmin) * h; }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void draw_panel(std::ostringstream& out, const std::vector<double>& t,
                const std::vector<Series>& series, Panel p, const char* y_label) {
    out << "<rect x=\"" << p.x0 << "\" y=\"" << p.y0 << "\" width=\"" << p.w << "\" height=\""
        << p.h << "\" fill=\"white\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    // horizontal gridlines at quarters
    for (int i = 1; i < 4; ++i) {
        const double y = p.y0 + p.h * i / 4.0;
        out << "<line x1=\"" << p.x0 << "\" y1=\"" << y << "\" x2=\"" << p.x0 + p.w << "\" y2=\""
            << y << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    }
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\"";
        if (s.dash) out << " stroke-dasharray=\"" << s.dash << "\"";
        out << " points=\"";
        for (std::size_t i = 0; i < t.size(); ++i) {
            out << p.sx(t[i]) << ',' << p.sy(s.values[i]) << ' ';
        }
        out << "\"/>\n";
    }
    // axis labels
    out << "<text x=\"" << p.x0 - 8 << "\" y=\"" << p.y0 + 10
        << "\" font-size=\"10\" text-anchor=\"end\" font-family=\"sans-serif\">" << fmt(p.vmax)
        << "</text>\n";
    out << "<text x=\"" << p.x0 - 8 << "\" y=\"" << p.y0 + p.h
        << "\" font-size=\"10\" text-anchor=\"end\" font-family=\"sans-serif\">" << fmt(p.vmin)
        << "</text>\n";
    out << "<text x=\"" << p.x0 << "\" y=\"" << p.y0 + p.h + 14
        << "\" font-size=\"10\" font-family=\"sans-serif\">" << fmt(p.tmin) << "</text>\n";
    out << "<text x=\"" << p.x0 + p.w << "\" y=\"" << p.y0 + p.h + 14
        << "\" font-size=\"10\" text-anchor=\"end\" font-family=\"sans-serif\">" << fmt(p.tmax)
        << " s</text>\n";
    out << "<text x=\"" << p.x0 + 6 << "\" y=\"" << p.y0 + 14
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << y_label << "</text>\n";
    // legend
    double lx = p.x0 + p.w - 150;
    double ly = p.y0 + 12;
    for (const auto& s : series) {
        out << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 24 << "\" y2=\""
            << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (s.dash) out << " stroke-dasharray=\"" << s.dash << "\"";
        out << "/>\n";
        out << "<text x=\"" << lx + 30 << "\" y=\"" << ly
            << "\" font-size=\"10\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        ly += 14;
    }
}

void fit(const std::vector<Series>& series, double& vmin, double& vmax) {
    vmin = 1e300;
    vmax = -1e300;
    for (const auto& s : series) {
        for (double v : s.values) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    if (!(vmax > vmin)) {
        vmax = vmin + 1.0;
    }
    const double pad = 0.05 * (vmax - vmin);
    vmin -= pad;
    vmax += pad;
}

}  // namespace

void render_svg(const SimLog& log, const std::filesystem::path& path) {
    if (log.records.empty()) throw IoError("refusing to render an empty log");

    std::vector<double> t;
    Series w{"w|_L", "#1f6fb4", nullptr, {}};
    Series what{"w_hat|_L", "#777777", "5,3", {}};
    Series h{"H", "#1f6fb4", nullptr, {}};
    Series hcl{"H_cl", "#2ca02c", nullptr, {}};
    Series htilde{"H_tilde", "#d62728", "5,3", {}};
    for (const auto& r : log.records) {
        t.push_back(r.t);
        w.values.push_back(r.w_L);
        what.values.push_back(r.what_L);
        h.values.push_back(r.H);
        hcl.values.push_back(r.Hcl);
        htilde.values.push_back(r.Htilde);
    }

    const double width = 640, height = 480;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const bool jb = log.framework == Framework::jb;
    const char* defl_label = jb ? "tip deflection (m)" : "reconstructed tip deflection (m)";

    std::vector<Series> top{w, what};
    Panel p1{60, 20, width - 90, 190, t.front(), t.back(), 0, 0};
    fit(top, p1.vmin, p1.vmax);
    draw_panel(out, t, top, p1, defl_label);

    std::vector<Series> bottom{h, hcl, htilde};
    Panel p2{60, 260, width - 90, 190, t.front(), t.back(), 0, 0};
    fit(bottom, p2.vmin, p2.vmax);
    draw_panel(out, t, bottom, p2, "energies (J)");

    out << "</svg>\n";
    write_text_atomic(path, out.str());
}

}  // namespace phs
