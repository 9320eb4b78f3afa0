#pragma once

#include "gasketlab/collapse.hpp"
#include "gasketlab/fold.hpp"
#include "gasketlab/lattice.hpp"
#include "gasketlab/phi.hpp"
#include "gasketlab/witness.hpp"

#include <string>
#include <vector>

namespace gasketlab {
namespace svg {

/// Minimal deterministic SVG writer; all coordinates fixed-format so repeated
/// runs emit identical bytes.
class Canvas {
  public:
    Canvas(double min_x, double min_y, double max_x, double max_y, int width_px = 900);

    void polygon(const std::vector<EuclidPoint>& pts, const std::string& fill,
                 const std::string& stroke, double stroke_width, double opacity = 1.0);
    void segment(const EuclidPoint& a, const EuclidPoint& b, const std::string& stroke,
                 double stroke_width);
    void circle(const EuclidPoint& c, double r, const std::string& fill);
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke, double stroke_width);

    std::string str() const;

  private:
    double tx(double x) const;
    double ty(double y) const;
    double scale_;
    double min_x_, min_y_, max_y_;
    int width_, height_;
    std::string body_;
};

std::string render_gasket(int level);
std::string render_witness_heatmap(const witness::ScalarWitness& w, int grid = 220);
std::string render_collapse(const collapse::CollapseStage& stage, int level);
std::string render_fold(const fold::FoldMap& fm);
std::string render_phi(const phi::PhiStage& stage);

}  // namespace svg
}  // namespace gasketlab
