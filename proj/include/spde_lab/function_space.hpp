#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spde_lab {

/// Uniform grid on (0,1) with n interior nodes and homogeneous Dirichlet
/// boundary values at xi_0 = 0 and xi_{n+1} = 1.
class Grid1D {
public:
    explicit Grid1D(std::size_t n);

    std::size_t n() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    /// Position of interior node i, 1 <= i <= n.
    double node(std::size_t i) const noexcept { return static_cast<double>(i) * h_; }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    std::size_t n_;
    double h_;
};

/// Nodal values u(xi_1), ..., u(xi_n) on a Grid1D. Storage index m holds
/// node m + 1; boundary values are implicit zeros.
class Field {
public:
    explicit Field(Grid1D grid);
    Field(Grid1D grid, std::vector<double> values);

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    double operator[](std::size_t m) const noexcept { return values_[m]; }
    double& operator[](std::size_t m) noexcept { return values_[m]; }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double c) noexcept;

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double c, Field a) { return a *= c; }
    friend bool operator==(const Field&, const Field&) = default;

    bool is_zero() const noexcept;

private:
    Grid1D grid_;
    std::vector<double> values_;
};

/// Throws DimensionError unless both fields live on the same grid.
void require_same_grid(const Field& u, const Field& v);

enum class TripleKind { PLaplace, FastDiffusion, LinearHeat };

/// Active Gelfand triple V in H in V*.
///   PLaplace(p):      V = W^{1,p}_0, H = L^2
///   FastDiffusion(r): V = L^{r+1},   H = W^{-1,2}
///   LinearHeat:       V = W^{1,2}_0, H = L^2 (oracle only)
class SpacePair {
public:
    static SpacePair p_laplace(double p);
    static SpacePair fast_diffusion(double r);
    static SpacePair linear_heat();

    TripleKind kind() const noexcept { return kind_; }
    /// p, r, or 2 for LinearHeat.
    double exponent() const noexcept { return exponent_; }

    double norm_v(const Field& u) const;

private:
    SpacePair(TripleKind kind, double exponent) : kind_(kind), exponent_(exponent) {}

    TripleKind kind_;
    double exponent_;
};

double inner_l2(const Field& u, const Field& v);

/// Forward differences D_j u = (u_{j+1} - u_j)/h for j = 0..n, with
/// u_0 = u_{n+1} = 0. Length n + 1.
std::vector<double> differences(const Field& u);

double norm_w1p(const Field& u, double p);
double norm_lr(const Field& u, double s);

Field laplacian_apply(const Field& u);

/// Solves -Delta_h u = f.
Field poisson_solve(const Field& f);

double inner_h(const Field& u, const Field& v, const SpacePair& sp);
double norm_h(const Field& u, const SpacePair& sp);

struct Eigenpair {
    double lambda;
    Field mode;
};

/// Closed-form Dirichlet eigenpair of -Delta_h:
/// lambda_k = (4/h^2) sin^2(k pi h / 2), e_k(xi_i) = sqrt(2) sin(k pi i h).
Eigenpair eigenpair(std::size_t k, const Grid1D& grid);
double eigenvalue(std::size_t k, const Grid1D& grid);

/// Field sum_k coeffs[k-1] e_k.
Field from_modes(std::span<const double> coeffs, const Grid1D& grid);

/// Thomas algorithm for a tridiagonal system. `lower[i]` multiplies x[i-1]
/// and `upper[i]` multiplies x[i+1]; lower[0] and upper[n-1] are ignored.
/// The matrix must admit elimination without pivoting (e.g. column-wise
/// diagonally dominant).
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<const double> rhs,
                       std::span<double> x);

}  // namespace spde_lab
