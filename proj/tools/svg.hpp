#pragma once

// Small hand-rolled SVG builder for the two report plots; nothing here aims
// to be a general plotting library.

#include <string>
#include <vector>

namespace birddet::svg {

class Canvas {
 public:
  Canvas(double width, double height);

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0, const std::string& dash = "");
  void polyline(const std::vector<std::pair<double, double>>& points,
                const std::string& stroke, double stroke_width = 1.0);
  void circle(double cx, double cy, double r, const std::string& fill);
  void text(double x, double y, const std::string& content, double size = 11.0,
            const std::string& anchor = "start");
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none");

  std::string finish() const;

 private:
  double width_, height_;
  std::string body_;
};

}  // namespace birddet::svg
