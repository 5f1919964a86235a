#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace stobb {
namespace svg {

// Fixed palette cycle; color index i maps to palette[i % size].
inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> p = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
        "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896",
        "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5"};
    return p;
}

struct Range {
    double lo = 0, hi = 1;
    void expand(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    static Range of(const std::vector<double>& vs) {
        if (vs.empty()) return {};
        Range r{vs[0], vs[0]};
        for (double v : vs) r.expand(v);
        if (r.hi == r.lo) r.hi = r.lo + 1;
        return r;
    }
    double scale(double v, double out_lo, double out_hi) const {
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

class Document {
  public:
    Document(int width, int height) : w_(width), h_(height) {
        body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\""
              << h_ << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n"
              << "<rect width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"white\"/>\n";
    }

    // marker 0: circle, 1: square, 2: triangle; cycles beyond that
    void marker(double x, double y, int shape, const std::string& color, double size = 4) {
        switch (shape % 3) {
            case 0:
                body_ << "<circle class=\"marker\" cx=\"" << x << "\" cy=\"" << y << "\" r=\""
                      << size / 2 << "\" fill=\"" << color << "\"/>\n";
                break;
            case 1:
                body_ << "<rect class=\"marker\" x=\"" << x - size / 2 << "\" y=\""
                      << y - size / 2 << "\" width=\"" << size << "\" height=\"" << size
                      << "\" fill=\"" << color << "\"/>\n";
                break;
            default:
                body_ << "<polygon class=\"marker\" points=\"" << x << "," << y - size / 2 << " "
                      << x - size / 2 << "," << y + size / 2 << " " << x + size / 2 << ","
                      << y + size / 2 << "\" fill=\"" << color << "\"/>\n";
        }
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
        body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (auto& [x, y] : pts) body_ << x << "," << y << " ";
        body_ << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 11) {
        body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
              << "\" font-family=\"sans-serif\">" << s << "</text>\n";
    }

    std::string str() const { return body_.str() + "</svg>\n"; }

  private:
    int w_, h_;
    std::ostringstream body_;
};

}  // namespace svg
}  // namespace stobb
