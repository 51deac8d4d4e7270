#include "spde_lab/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spde_lab/errors.hpp"

namespace spde_lab {

Grid1D::Grid1D(std::size_t n) : n_(n), h_(0.0) {
    if (n == 0) throw ParameterError("grid needs at least one interior node");
    h_ = 1.0 / static_cast<double>(n + 1);
}

Field::Field(Grid1D grid) : grid_(grid), values_(grid.n(), 0.0) {}

Field::Field(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n()) {
        throw DimensionError("field has " + std::to_string(values_.size()) +
                             " values but grid has " + std::to_string(grid_.n()) + " nodes");
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
        throw ParameterError("field values must be finite");
    }
}

Field& Field::operator+=(const Field& other) {
    require_same_grid(*this, other);
    for (std::size_t m = 0; m < values_.size(); ++m) values_[m] += other.values_[m];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_grid(*this, other);
    for (std::size_t m = 0; m < values_.size(); ++m) values_[m] -= other.values_[m];
    return *this;
}

Field& Field::operator*=(double c) noexcept {
    for (double& v : values_) v *= c;
    return *this;
}

bool Field::is_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

void require_same_grid(const Field& u, const Field& v) {
    if (!(u.grid() == v.grid())) {
        throw DimensionError("fields live on different grids (n=" + std::to_string(u.grid().n()) +
                             " vs n=" + std::to_string(v.grid().n()) + ")");
    }
}

SpacePair SpacePair::p_laplace(double p) {
    if (!(p > 1.0 && p < 2.0)) throw ParameterError("p must lie in (1,2)");
    return {TripleKind::PLaplace, p};
}

SpacePair SpacePair::fast_diffusion(double r) {
    if (!(r > 0.0 && r < 1.0)) throw ParameterError("r must lie in (0,1)");
    return {TripleKind::FastDiffusion, r};
}

SpacePair SpacePair::linear_heat() { return {TripleKind::LinearHeat, 2.0}; }

double SpacePair::norm_v(const Field& u) const {
    switch (kind_) {
        case TripleKind::PLaplace: return norm_w1p(u, exponent_);
        case TripleKind::FastDiffusion: return norm_lr(u, exponent_ + 1.0);
        case TripleKind::LinearHeat: return norm_w1p(u, 2.0);
    }
    return 0.0;
}

double inner_l2(const Field& u, const Field& v) {
    require_same_grid(u, v);
    double sum = 0.0;
    for (std::size_t m = 0; m < u.size(); ++m) sum += u[m] * v[m];
    return u.grid().h() * sum;
}

std::vector<double> differences(const Field& u) {
    const std::size_t n = u.size();
    const double inv_h = 1.0 / u.grid().h();
    std::vector<double> d(n + 1);
    double left = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = (u[j] - left) * inv_h;
        left = u[j];
    }
    d[n] = -left * inv_h;
    return d;
}

double norm_w1p(const Field& u, double p) {
    if (!(p > 1.0)) throw ParameterError("W^{1,p} norm needs p > 1");
    double sum = 0.0;
    for (double d : differences(u)) sum += std::pow(std::abs(d), p);
    return std::pow(u.grid().h() * sum, 1.0 / p);
}

double norm_lr(const Field& u, double s) {
    if (!(s >= 1.0)) throw ParameterError("L^s norm needs s >= 1");
    double sum = 0.0;
    for (double v : u.values()) sum += std::pow(std::abs(v), s);
    return std::pow(u.grid().h() * sum, 1.0 / s);
}

Field laplacian_apply(const Field& u) {
    const std::size_t n = u.size();
    const double inv_h2 = 1.0 / (u.grid().h() * u.grid().h());
    Field out(u.grid());
    for (std::size_t m = 0; m < n; ++m) {
        const double left = m > 0 ? u[m - 1] : 0.0;
        const double right = m + 1 < n ? u[m + 1] : 0.0;
        out[m] = (left - 2.0 * u[m] + right) * inv_h2;
    }
    return out;
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<const double> rhs,
                       std::span<double> x) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n || x.size() != n) {
        throw DimensionError("tridiagonal system size mismatch");
    }
    if (n == 0) return;
    std::vector<double> c(n);
    double denom = diag[0];
    c[0] = upper[0] / denom;
    x[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / denom;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i > 0; --i) x[i - 1] -= c[i - 1] * x[i];
}

Field poisson_solve(const Field& f) {
    const std::size_t n = f.size();
    const double inv_h2 = 1.0 / (f.grid().h() * f.grid().h());
    std::vector<double> off(n, -inv_h2);
    std::vector<double> diag(n, 2.0 * inv_h2);
    Field u(f.grid());
    solve_tridiagonal(off, diag, off, f.values(), u.values());
    return u;
}

double inner_h(const Field& u, const Field& v, const SpacePair& sp) {
    if (sp.kind() == TripleKind::FastDiffusion) {
        require_same_grid(u, v);
        return inner_l2(u, poisson_solve(v));
    }
    return inner_l2(u, v);
}

double norm_h(const Field& u, const SpacePair& sp) {
    // (-Delta_h)^{-1} is positive definite, so the radicand is >= 0 up to roundoff.
    return std::sqrt(std::max(0.0, inner_h(u, u, sp)));
}

double eigenvalue(std::size_t k, const Grid1D& grid) {
    if (k < 1 || k > grid.n()) {
        throw ParameterError("eigenmode index " + std::to_string(k) + " outside [1, " +
                             std::to_string(grid.n()) + "]");
    }
    const double h = grid.h();
    const double s = std::sin(static_cast<double>(k) * std::numbers::pi * h / 2.0);
    return 4.0 / (h * h) * s * s;
}

Eigenpair eigenpair(std::size_t k, const Grid1D& grid) {
    const double lambda = eigenvalue(k, grid);
    Field mode(grid);
    const double kk = static_cast<double>(k);
    for (std::size_t m = 0; m < grid.n(); ++m) {
        mode[m] = std::numbers::sqrt2 * std::sin(kk * std::numbers::pi * grid.node(m + 1));
    }
    return {lambda, std::move(mode)};
}

Field from_modes(std::span<const double> coeffs, const Grid1D& grid) {
    if (coeffs.size() > grid.n()) {
        throw ParameterError("more mode coefficients than grid nodes");
    }
    Field u(grid);
    for (std::size_t k = 1; k <= coeffs.size(); ++k) {
        if (coeffs[k - 1] == 0.0) continue;
        u += coeffs[k - 1] * eigenpair(k, grid).mode;
    }
    return u;
}

}  // namespace spde_lab
