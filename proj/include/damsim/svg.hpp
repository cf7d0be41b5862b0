#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "damsim/common.hpp"

namespace damsim {

/// Minimal static line-chart writer (SVG). Deterministic output: fixed
/// canvas, fixed palette, "%.6g" numbers.
class SvgChart {
public:
    SvgChart(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_series(std::string name, std::vector<double> xs, std::vector<double> ys,
                    bool markers = false) {
        series_.push_back({std::move(name), std::move(xs), std::move(ys), markers});
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write chart '" + path + "'");
        const double W = 860, H = 480, L = 70, R = 180, Tm = 40, B = 50;
        double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
        for (const auto& s : series_)
            for (size_t k = 0; k < s.xs.size(); ++k) {
                xmin = std::min(xmin, s.xs[k]);
                xmax = std::max(xmax, s.xs[k]);
                ymin = std::min(ymin, s.ys[k]);
                ymax = std::max(ymax, s.ys[k]);
            }
        if (!(xmin < xmax)) xmax = xmin + 1.0;
        if (!(ymin < ymax)) ymax = ymin + 1.0;
        const double ypad = 0.05 * (ymax - ymin);
        ymin -= ypad;
        ymax += ypad;
        auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
        auto sy = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - Tm - B); };
        auto num = [](double v) {
            char b[32];
            std::snprintf(b, sizeof(b), "%.6g", v);
            return std::string(b);
        };

        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
            << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
        out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
            << title_ << "</text>\n";
        // Axes and gridlines.
        for (int k = 0; k <= 5; ++k) {
            const double yv = ymin + k * (ymax - ymin) / 5.0;
            const double xv = xmin + k * (xmax - xmin) / 5.0;
            out << "<line x1=\"" << L << "\" y1=\"" << sy(yv) << "\" x2=\"" << W - R << "\" y2=\""
                << sy(yv) << "\" stroke=\"#dddddd\"/>\n";
            out << "<text x=\"" << L - 6 << "\" y=\"" << sy(yv) + 4
                << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
            out << "<text x=\"" << sx(xv) << "\" y=\"" << H - B + 16
                << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
        }
        out << "<line x1=\"" << L << "\" y1=\"" << Tm << "\" x2=\"" << L << "\" y2=\"" << H - B
            << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
            << H - B << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << (L + (W - R)) / 2 << "\" y=\"" << H - 12
            << "\" text-anchor=\"middle\">" << x_label_ << "</text>\n";
        out << "<text x=\"16\" y=\"" << (Tm + H - B) / 2
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (Tm + H - B) / 2 << ")\">"
            << y_label_ << "</text>\n";

        static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                        "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
        for (size_t si = 0; si < series_.size(); ++si) {
            const auto& s = series_[si];
            const char* color = palette[si % 8];
            if (!s.markers) {
                out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
                for (size_t k = 0; k < s.xs.size(); ++k)
                    out << num(sx(s.xs[k])) << "," << num(sy(s.ys[k])) << " ";
                out << "\"/>\n";
            } else {
                for (size_t k = 0; k < s.xs.size(); ++k)
                    out << "<circle cx=\"" << num(sx(s.xs[k])) << "\" cy=\"" << num(sy(s.ys[k]))
                        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            }
            const double ly = Tm + 16.0 * static_cast<double>(si);
            out << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30
                << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
            out << "<text x=\"" << W - R + 36 << "\" y=\"" << ly + 4 << "\">" << s.name
                << "</text>\n";
        }
        out << "</svg>\n";
    }

private:
    struct Series {
        std::string name;
        std::vector<double> xs, ys;
        bool markers = false;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

} // namespace damsim
