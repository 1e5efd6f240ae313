#include "opstep/linops.hpp"
#include "opstep/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace opstep {

namespace {

void require_dim(const PolyOperator& op, std::size_t len, const char* what) {
    if (op.n() == 0) {
        throw std::invalid_argument(std::string(what) + ": empty operator");
    }
    if (op.base.offdiag.size() + 1 != op.n()) {
        throw std::invalid_argument(std::string(what) +
                                    ": off-diagonal length must be n-1");
    }
    if (len != op.n()) {
        throw std::invalid_argument(std::string(what) + ": vector length " +
                                    std::to_string(len) +
                                    " does not match operator dimension " +
                                    std::to_string(op.n()));
    }
}

/// Solves (D + shift·I)x = b by one Thomas elimination sweep.
/// Valid for positive definite shifted matrices (no pivoting).
void shifted_tridiag_solve(const SymTridiag& D, double shift,
                           std::span<const double> b, std::vector<double>& x,
                           std::vector<double>& scratch) {
    const std::size_t n = D.n();
    x.assign(b.begin(), b.end());
    scratch.resize(n); // upper-diagonal multipliers
    double piv = D.diag[0] + shift;
    if (piv == 0.0) {
        throw std::domain_error("solve: zero pivot in tridiagonal sweep");
    }
    scratch[0] = (n > 1) ? D.offdiag[0] / piv : 0.0;
    x[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        const double e = D.offdiag[i - 1];
        piv = D.diag[i] + shift - e * scratch[i - 1];
        if (piv == 0.0) {
            throw std::domain_error("solve: zero pivot in tridiagonal sweep");
        }
        if (i + 1 < n) {
            scratch[i] = D.offdiag[i] / piv;
        }
        x[i] = (x[i] - e * x[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= scratch[i] * x[i + 1];
    }
}

} // namespace

BandedSym assemble_bands(const PolyOperator& op) {
    const std::size_t n = op.n();
    const auto& d = op.base.diag;
    const auto& e = op.base.offdiag;
    BandedSym m;
    m.b0.resize(n);
    m.b1.resize(n > 0 ? n - 1 : 0);
    m.b2.resize(n > 1 ? n - 2 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double el = (i > 0) ? e[i - 1] : 0.0;
        const double er = (i + 1 < n) ? e[i] : 0.0;
        m.b0[i] = op.c0 + op.c1 * d[i] + op.c2 * (d[i] * d[i] + el * el + er * er);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m.b1[i] = op.c1 * e[i] + op.c2 * e[i] * (d[i] + d[i + 1]);
    }
    for (std::size_t i = 0; i + 2 < n; ++i) {
        m.b2[i] = op.c2 * e[i] * e[i + 1];
    }
    return m;
}

std::vector<double> apply(const PolyOperator& op, std::span<const double> x) {
    require_dim(op, x.size(), "apply");
    const auto& k = kern::active_kernels();
    const std::size_t n = op.n();
    std::vector<double> out(n);
    if (op.c1 == 0.0 && op.c2 == 0.0) {
        k.combine2(op.c0, x.data(), 0.0, x.data(), out.data(), n);
        return out;
    }
    std::vector<double> Dx(n);
    k.tridiag_apply(op.base.diag.data(), op.base.offdiag.data(), x.data(),
                    Dx.data(), n);
    if (op.c2 == 0.0) {
        k.combine2(op.c0, x.data(), op.c1, Dx.data(), out.data(), n);
        return out;
    }
    std::vector<double> DDx(n);
    k.tridiag_apply(op.base.diag.data(), op.base.offdiag.data(), Dx.data(),
                    DDx.data(), n);
    k.combine3(op.c0, x.data(), op.c1, Dx.data(), op.c2, DDx.data(),
               out.data(), n);
    return out;
}

std::vector<double> solve(const PolyOperator& op, std::span<const double> b) {
    require_dim(op, b.size(), "solve");
    const std::size_t n = op.n();
    std::vector<double> x(n);
    std::vector<double> scratch;

    if (op.c2 == 0.0 && op.c1 == 0.0) {
        if (op.c0 <= 0.0) {
            throw std::domain_error("solve: operator c0*I is not positive definite");
        }
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = b[i] / op.c0;
        }
        return x;
    }

    if (op.c2 == 0.0) {
        // c0·I + c1·D: a single sweep on c1·(D + (c0/c1)·I).
        shifted_tridiag_solve(op.base, op.c0 / op.c1, b, x, scratch);
        for (double& v : x) {
            v /= op.c1;
        }
        return x;
    }

    // Real-root factorization c2·(D − λ1·I)(D − λ2·I).
    const double disc = op.c1 * op.c1 - 4.0 * op.c2 * op.c0;
    double lambda1;
    double lambda2;
    if (disc < -1e-14) {
        throw std::domain_error(
            "solve: quadratic operator has complex roots (discriminant " +
            std::to_string(disc) + ")");
    }
    if (disc < 0.0) {
        // Round-off shy of zero: double root.
        lambda1 = lambda2 = -op.c1 / (2.0 * op.c2);
    } else {
        const double s = std::sqrt(disc);
        const double q = -0.5 * (op.c1 + std::copysign(s, op.c1));
        if (q != 0.0) {
            lambda1 = q / op.c2;
            lambda2 = op.c0 / q;
        } else {
            lambda1 = lambda2 = 0.0; // c1 = 0 and disc = 0 imply c0 = 0
        }
    }

    std::vector<double> t(n);
    shifted_tridiag_solve(op.base, -lambda1, b, t, scratch);
    for (double& v : t) {
        v /= op.c2;
    }
    shifted_tridiag_solve(op.base, -lambda2, t, x, scratch);
    return x;
}

double weighted_norm(const PolyOperator& op, std::span<const double> u) {
    std::vector<double> Pu = opstep::apply(op, u);
    const double form = kern::active_kernels().dot(Pu.data(), u.data(), u.size());
    if (form < 0.0) {
        throw std::domain_error(
            "weighted_norm: negative quadratic form (operator not SPD)");
    }
    return std::sqrt(form);
}

double inv_weighted_norm(const PolyOperator& op, std::span<const double> u) {
    std::vector<double> x = solve(op, u);
    const double form = kern::active_kernels().dot(x.data(), u.data(), u.size());
    if (form < 0.0) {
        throw std::domain_error(
            "inv_weighted_norm: negative quadratic form (operator not SPD)");
    }
    return std::sqrt(form);
}

bool spd_check(const PolyOperator& op) {
    const std::size_t n = op.n();
    if (n == 0 || op.base.offdiag.size() + 1 != n) {
        return false;
    }
    const BandedSym m = assemble_bands(op);
    // Banded LDL^T with unit lower bands l1, l2; all pivots must be positive.
    std::vector<double> d(n), l1(n, 0.0), l2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= 2) {
            l2[i] = m.b2[i - 2] / d[i - 2];
        }
        if (i >= 1) {
            double v = m.b1[i - 1];
            if (i >= 2) {
                v -= l2[i] * l1[i - 1] * d[i - 2];
            }
            l1[i] = v / d[i - 1];
        }
        double piv = m.b0[i];
        if (i >= 1) {
            piv -= l1[i] * l1[i] * d[i - 1];
        }
        if (i >= 2) {
            piv -= l2[i] * l2[i] * d[i - 2];
        }
        if (!(piv > 0.0)) {
            return false;
        }
        d[i] = piv;
    }
    return true;
}

} // namespace opstep
