#pragma once

#include <Eigen/Dense>

#include <memory>
#include <numbers>

namespace kakinuma {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Grid values of a periodic function (length M).
using ScalarField = Vec;
// Columns are the coefficient fields phi_{l,0..K-1} on the grid (M x K).
using PotentialVec = Mat;

// Periodic grid with a real Fourier basis that omits the Nyquist mode.
//
// Coefficient index 0 is the constant 1/sqrt(L); indices 2k-1 and 2k carry
// sqrt(2/L) cos(k xi1 x) and sqrt(2/L) sin(k xi1 x) for k = 1..M/2-1. The basis is
// orthonormal in L2(0,L), so Euclidean products of coefficient vectors are L2 products.
class PeriodicGrid {
public:
    explicit PeriodicGrid(int M, double length = 2.0 * std::numbers::pi);

    int M() const { return M_; }
    int modes() const { return M_ - 1; }
    int padded_size() const { return Mp_; }
    double length() const { return L_; }
    double dx() const { return L_ / M_; }
    double node(int j) const { return j * L_ / M_; }
    Vec nodes() const;
    Vec padded_nodes() const;
    double xi1() const { return xi1_; }
    // Wavenumber carried by coefficient index idx.
    double wavenumber(int idx) const;

    Vec to_modes(const Vec& values) const;
    Vec to_values(const Vec& modes) const;
    Mat to_modes(const Mat& values) const;
    Mat to_values(const Mat& modes) const;
    Vec to_padded(const Vec& modes) const;
    Vec from_padded(const Vec& padded_values) const;
    Vec padded_from_values(const Vec& values) const { return to_padded(to_modes(values)); }

    // Galerkin matrix of multiplication by a (given on the 3/2-padded grid).
    Mat galerkin(const Vec& a_padded) const;

    Vec d_modes(const Vec& modes) const;
    Mat d_left(const Mat& X) const;   // D * X
    Mat d_right(const Mat& X) const;  // X * D
    Mat d_matrix() const;

    // Dealiased product of two grid functions.
    Vec product(const Vec& f, const Vec& g) const;

    double integrate(const Vec& values) const;
    double mean(const Vec& values) const { return integrate(values) / L_; }
    double inner(const Vec& f, const Vec& g) const { return to_modes(f).dot(to_modes(g)); }

private:
    int M_;
    int Mp_;
    double L_;
    double xi1_;
    Mat E_;      // M x n, basis values at nodes
    Mat Ep_;     // Mp x n, basis values at padded nodes
    Mat cosq_;   // Mp x (M-1), cos(q xi1 x_j) on the padded grid
    Mat sinq_;
};

using GridPtr = std::shared_ptr<const PeriodicGrid>;

ScalarField deriv(const PeriodicGrid& g, const ScalarField& f, int order = 1);
ScalarField inverse_laplacian(const PeriodicGrid& g, const ScalarField& f, double tol = 1e-10);
double half_inverse_laplacian_norm(const PeriodicGrid& g, const ScalarField& f, double s,
                                   double tol = 1e-10);
double sobolev_norm(const PeriodicGrid& g, const ScalarField& f, double s);
// H^s norm of a coefficient vector.
double sobolev_norm_modes(const PeriodicGrid& g, const Vec& modes, double s);

}  // namespace kakinuma
