#include "seqreg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seqreg {

Grid::Grid(Eigen::VectorXd points) {
  const Eigen::Index M = points.size();
  if (M < 3) {
    throw std::invalid_argument("grid needs at least 3 points, got " + std::to_string(M));
  }
  if (points[0] != 0.0 || points[M - 1] != 1.0) {
    throw std::invalid_argument("grid must start at 0 and end at 1");
  }
  for (Eigen::Index m = 1; m < M; ++m) {
    if (!(points[m] > points[m - 1])) {
      throw std::invalid_argument("grid points must be strictly increasing");
    }
  }

  auto data = std::make_shared<Data>();
  data->weights = Eigen::VectorXd::Zero(M);
  for (Eigen::Index m = 0; m + 1 < M; ++m) {
    const double h = points[m + 1] - points[m];
    data->weights[m] += 0.5 * h;
    data->weights[m + 1] += 0.5 * h;
  }
  const double h0 = 1.0 / static_cast<double>(M - 1);
  data->uniform = true;
  for (Eigen::Index m = 0; m < M; ++m) {
    if (std::abs(points[m] - h0 * static_cast<double>(m)) > 1e-12) {
      data->uniform = false;
      break;
    }
  }
  data->points = std::move(points);
  data_ = std::move(data);
}

bool operator==(const Grid& a, const Grid& b) {
  if (a.data_ == b.data_) return true;
  if (!a.data_ || !b.data_) return false;
  return a.points().size() == b.points().size() && a.points() == b.points();
}

FunctionSample::FunctionSample(Grid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("function values do not match grid size");
  }
  if (!values.allFinite()) {
    throw std::invalid_argument("function values must be finite");
  }
}

Grid make_uniform_grid(int M) {
  if (M < 3) {
    throw std::invalid_argument("make_uniform_grid: M must be >= 3");
  }
  Eigen::VectorXd t(M);
  for (int m = 0; m < M; ++m) t[m] = static_cast<double>(m) / static_cast<double>(M - 1);
  t[M - 1] = 1.0;
  return Grid(std::move(t));
}

double inner(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& a,
             const Eigen::Ref<const Eigen::VectorXd>& b) {
  return (grid.weights().array() * a.array() * b.array()).sum();
}

FunctionSample derivative(const FunctionSample& f) {
  const auto& t = f.grid.points();
  const auto& v = f.values;
  const Eigen::Index M = t.size();
  Eigen::VectorXd d(M);
  d[0] = (v[1] - v[0]) / (t[1] - t[0]);
  for (Eigen::Index m = 1; m + 1 < M; ++m) {
    d[m] = (v[m + 1] - v[m - 1]) / (t[m + 1] - t[m - 1]);
  }
  d[M - 1] = (v[M - 1] - v[M - 2]) / (t[M - 1] - t[M - 2]);
  return {f.grid, std::move(d)};
}

double interp_linear(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& values, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("interp_linear: query outside [0, 1]");
  }
  const auto& x = grid.points();
  const Eigen::Index M = x.size();
  Eigen::Index k;
  if (grid.is_uniform()) {
    k = static_cast<Eigen::Index>(t * static_cast<double>(M - 1));
  } else {
    k = static_cast<Eigen::Index>(std::upper_bound(x.data(), x.data() + M, t) - x.data()) - 1;
  }
  k = std::clamp<Eigen::Index>(k, 0, M - 2);
  const double u = (t - x[k]) / (x[k + 1] - x[k]);
  return values[k] + u * (values[k + 1] - values[k]);
}

Eigen::VectorXd interp_linear(const FunctionSample& f, std::span<const double> query) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(query.size()));
  for (std::size_t i = 0; i < query.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = interp_linear(f.grid, f.values, query[i]);
  }
  return out;
}

namespace {

// Cox-de Boor recursion for all cubic basis functions at a single point.
void eval_cubic_bsplines(const Eigen::VectorXd& knots, int B, double t, Eigen::Ref<Eigen::RowVectorXd> out) {
  constexpr int order = 4;
  const int nk = static_cast<int>(knots.size());
  out.setZero();
  if (t >= knots[nk - 1]) {
    out[B - 1] = 1.0;
    return;
  }
  // degree-0 indicators on the knot spans
  Eigen::VectorXd N = Eigen::VectorXd::Zero(nk - 1);
  for (int i = 0; i + 1 < nk; ++i) {
    if (knots[i] <= t && t < knots[i + 1]) N[i] = 1.0;
  }
  for (int p = 1; p < order; ++p) {
    for (int i = 0; i + p + 1 < nk; ++i) {
      double v = 0.0;
      const double den1 = knots[i + p] - knots[i];
      const double den2 = knots[i + p + 1] - knots[i + 1];
      if (den1 > 0.0) v += (t - knots[i]) / den1 * N[i];
      if (den2 > 0.0) v += (knots[i + p + 1] - t) / den2 * N[i + 1];
      N[i] = v;
    }
  }
  for (int b = 0; b < B; ++b) out[b] = N[b];
}

}  // namespace

Eigen::MatrixXd bspline_design(const Grid& grid, int B, Eigen::VectorXd* knots_out) {
  if (B < 4) {
    throw std::invalid_argument("cubic B-spline basis needs B >= 4");
  }
  const int interior = B - 4;
  Eigen::VectorXd knots(B + 4);
  for (int i = 0; i < 4; ++i) {
    knots[i] = 0.0;
    knots[B + i] = 1.0;
  }
  for (int i = 1; i <= interior; ++i) {
    knots[3 + i] = static_cast<double>(i) / static_cast<double>(interior + 1);
  }

  const Eigen::Index M = grid.size();
  Eigen::MatrixXd X(M, B);
  Eigen::RowVectorXd row(B);
  for (Eigen::Index m = 0; m < M; ++m) {
    eval_cubic_bsplines(knots, B, grid[m], row);
    X.row(m) = row;
  }
  if (knots_out) *knots_out = knots;
  return X;
}

BasisSet make_basis(const Grid& grid, int B) {
  BasisSet basis;
  basis.grid = grid;
  basis.count = B;
  basis.phi = bspline_design(grid, B, &basis.raw_knots);

  // Modified Gram-Schmidt under the trapezoid inner product, two passes.
  auto& Q = basis.phi;
  for (int b = 0; b < B; ++b) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int a = 0; a < b; ++a) {
        const double r = inner(grid, Q.col(a), Q.col(b));
        Q.col(b) -= r * Q.col(a);
      }
    }
    const double nrm = std::sqrt(inner(grid, Q.col(b), Q.col(b)));
    if (!(nrm > 1e-12)) {
      throw std::invalid_argument("basis columns are linearly dependent on this grid");
    }
    Q.col(b) /= nrm;
  }
  return basis;
}

FunctionSample synthesize(const BasisSet& basis, const Eigen::Ref<const Eigen::VectorXd>& c) {
  if (c.size() != basis.count) {
    throw std::invalid_argument("synthesize: coefficient length does not match basis");
  }
  return {basis.grid, basis.phi * c};
}

Eigen::VectorXd project_onto_basis(const BasisSet& basis,
                                   const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (values.size() != basis.grid.size()) {
    throw std::invalid_argument("project_onto_basis: length does not match grid");
  }
  return basis.phi.transpose() * (basis.grid.weights().array() * values.array()).matrix();
}

}  // namespace seqreg
