#include "stagpoint/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace stagpoint {

namespace {

std::string fx(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace

std::string svg_log_plot(const std::string& title, const std::string& ylabel, const Samples& samples, double reference) {
    constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [r, v] : samples)
        if (r > 0.0 && std::isfinite(v)) pts.emplace_back(std::log10(r), v);

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fx(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";
    if (pts.empty()) {
        o << "<text x=\"" << fx(W / 2) << "\" y=\"" << fx(H / 2)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\">no finite samples</text>\n</svg>\n";
        return o.str();
    }
    double xmin = pts.front().first, xmax = xmin, ymin = pts.front().second, ymax = ymin;
    for (const auto& [x, y] : pts) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (std::isfinite(reference)) {
        ymin = std::min(ymin, reference);
        ymax = std::max(ymax, reference);
    }
    xmin = std::floor(xmin);
    xmax = std::max(std::ceil(xmax), xmin + 1.0);
    if (ymax - ymin < 1e-12 * std::max(1.0, std::fabs(ymax))) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    o << "<g stroke=\"black\" fill=\"none\">\n";
    o << "<line x1=\"" << fx(L) << "\" y1=\"" << fx(H - B) << "\" x2=\"" << fx(W - R) << "\" y2=\"" << fx(H - B) << "\"/>\n";
    o << "<line x1=\"" << fx(L) << "\" y1=\"" << fx(T) << "\" x2=\"" << fx(L) << "\" y2=\"" << fx(H - B) << "\"/>\n";
    o << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); ++d)
        o << "<text x=\"" << fx(px(d)) << "\" y=\"" << fx(H - B + 16) << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double y = ymin + (ymax - ymin) * k / 4.0;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", y);
        o << "<text x=\"" << fx(L - 6) << "\" y=\"" << fx(py(y) + 4) << "\" text-anchor=\"end\">" << buf << "</text>\n";
    }
    o << "<text x=\"" << fx(W / 2) << "\" y=\"" << fx(H - 10) << "\" text-anchor=\"middle\">r</text>\n";
    o << "<text x=\"16\" y=\"" << fx(H / 2) << "\" transform=\"rotate(-90 16 " << fx(H / 2)
      << ")\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n</g>\n";
    if (std::isfinite(reference))
        o << "<line x1=\"" << fx(L) << "\" y1=\"" << fx(py(reference)) << "\" x2=\"" << fx(W - R) << "\" y2=\""
          << fx(py(reference)) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    std::sort(pts.begin(), pts.end());
    o << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) o << (i ? " " : "") << fx(px(pts[i].first)) << ',' << fx(py(pts[i].second));
    o << "\"/>\n";
    for (const auto& [x, y] : pts)
        o << "<circle cx=\"" << fx(px(x)) << "\" cy=\"" << fx(py(y)) << "\" r=\"2\" fill=\"#1f5fa8\"/>\n";
    o << "</svg>\n";
    return o.str();
}

}  // namespace stagpoint
