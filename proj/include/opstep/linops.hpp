#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace opstep {

/// Symmetric tridiagonal matrix, stored as its diagonal and one off-diagonal.
struct SymTridiag {
    std::vector<double> diag;    ///< n entries
    std::vector<double> offdiag; ///< n−1 entries

    std::size_t n() const { return diag.size(); }
};

/// Quadratic polynomial c0·I + c1·D + c2·D² in a symmetric tridiagonal D.
///
/// This one family houses every operator in the library: the elliptic
/// operator itself, the equation coefficients, per-step implicit operators,
/// and energy operators. Keeping all of them polynomials in a single base
/// matrix is what lets every implicit solve reduce to one or two shifted
/// tridiagonal sweeps.
struct PolyOperator {
    SymTridiag base; ///< the matrix D
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    std::size_t n() const { return base.n(); }
};

/// Symmetric banded form of a PolyOperator: main diagonal b0 (n entries),
/// first off-diagonal b1 (n−1), second off-diagonal b2 (n−2, zero band
/// omitted when c2 = 0 would make it empty anyway).
struct BandedSym {
    std::vector<double> b0;
    std::vector<double> b1;
    std::vector<double> b2;
};

/// Assembled banded entries of op (used by the SPD test and verification).
BandedSym assemble_bands(const PolyOperator& op);

/// op·x. Throws std::invalid_argument on dimension mismatch.
std::vector<double> apply(const PolyOperator& op, std::span<const double> x);

/// Solves op·x = b for SPD op via real-root factorization:
/// c2·(D − λ1·I)(D − λ2·I) with λ the roots of c2λ² + c1λ + c0, each factor
/// handled by one tridiagonal elimination sweep. A pentadiagonal system is
/// never assembled. Discriminants in [−1e−14, 0) are treated as a double
/// root at −c1/(2c2) to absorb round-off near repeated roots.
///
/// Throws std::domain_error when the quadratic has complex roots
/// (discriminant < −1e−14) or the operator is not positive definite, and
/// std::invalid_argument on dimension mismatch.
std::vector<double> solve(const PolyOperator& op, std::span<const double> b);

/// √((op·u, u)) for SPD op. Throws std::domain_error if the quadratic form
/// is negative (non-SPD signal; never clamped).
double weighted_norm(const PolyOperator& op, std::span<const double> u);

/// √((op⁻¹·u, u)) for SPD op: one solve, then an inner product.
double inv_weighted_norm(const PolyOperator& op, std::span<const double> u);

/// True iff a symmetric pivoted factorization (banded LDLᵀ) of the
/// assembled matrix yields all pivots > 0. Pure predicate; never throws.
bool spd_check(const PolyOperator& op);

} // namespace opstep
