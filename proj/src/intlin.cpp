#include "hypotor/intlin.hpp"

namespace hypotor {

namespace {

size_t cols_of(const IntMat& A) { return A.empty() ? 0 : A[0].size(); }

}  // namespace

std::optional<DiophantineSolution> solve_linear_diophantine(const IntMat& A, const IntVec& c) {
    size_t m = A.size();
    size_t n = cols_of(A);
    if (c.size() != m) throw PreconditionViolation("diophantine: rhs length mismatch");
    // W = A * U, column reduction to a lower-staircase form; U stays unimodular.
    IntMat W = A;
    IntMat U(n, IntVec(n, Int(0)));
    for (size_t j = 0; j < n; ++j) U[j][j] = 1;

    auto col_combine = [&](size_t ja, size_t jb, const Int& s, const Int& t, const Int& u,
                           const Int& v) {
        // (col_ja, col_jb) <- (s*col_ja + t*col_jb, u*col_ja + v*col_jb)
        for (size_t i = 0; i < m; ++i) {
            Int na = s * W[i][ja] + t * W[i][jb];
            Int nb = u * W[i][ja] + v * W[i][jb];
            W[i][ja] = na;
            W[i][jb] = nb;
        }
        for (size_t i = 0; i < n; ++i) {
            Int na = s * U[i][ja] + t * U[i][jb];
            Int nb = u * U[i][ja] + v * U[i][jb];
            U[i][ja] = na;
            U[i][jb] = nb;
        }
    };
    auto col_negate = [&](size_t j) {
        for (size_t i = 0; i < m; ++i) W[i][j] = -W[i][j];
        for (size_t i = 0; i < n; ++i) U[i][j] = -U[i][j];
    };

    std::vector<std::pair<size_t, size_t>> pivots;  // (row, col)
    size_t rank = 0;
    for (size_t i = 0; i < m && rank < n; ++i) {
        // move a nonzero entry into the pivot column
        size_t nz = rank;
        while (nz < n && W[i][nz] == 0) ++nz;
        if (nz == n) continue;
        if (nz != rank) col_combine(rank, nz, Int(0), Int(1), Int(1), Int(0));
        for (size_t j = rank + 1; j < n; ++j) {
            if (W[i][j] == 0) continue;
            XGcd e = xgcd(W[i][rank], W[i][j]);
            Int a = W[i][rank] / e.g;
            Int b = W[i][j] / e.g;
            col_combine(rank, j, e.x, e.y, -b, a);
        }
        if (W[i][rank] < 0) col_negate(rank);
        pivots.push_back({i, rank});
        ++rank;
    }

    // forward solve in the pivot columns
    IntVec y(n, Int(0));
    std::vector<bool> pivot_row(m, false);
    for (auto& [pi, pj] : pivots) pivot_row[pi] = true;
    for (auto& [pi, pj] : pivots) {
        Int r = c[pi];
        for (size_t j = 0; j < pj; ++j) r -= W[pi][j] * y[j];
        Int q, rem;
        mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), r.get_mpz_t(), W[pi][pj].get_mpz_t());
        if (rem != 0) return std::nullopt;
        y[pj] = q;
    }
    // rows without pivots must be consistent
    for (size_t i = 0; i < m; ++i) {
        if (pivot_row[i]) continue;
        Int r = c[i];
        for (size_t j = 0; j < n; ++j) r -= W[i][j] * y[j];
        if (r != 0) return std::nullopt;
    }

    DiophantineSolution sol;
    sol.particular.assign(n, Int(0));
    for (size_t i = 0; i < n; ++i) {
        Int acc(0);
        for (size_t j = 0; j < n; ++j) acc += U[i][j] * y[j];
        sol.particular[i] = acc;
    }
    for (size_t j = rank; j < n; ++j) {
        IntVec v(n);
        for (size_t i = 0; i < n; ++i) v[i] = U[i][j];
        sol.lattice.push_back(std::move(v));
    }
    return sol;
}

std::vector<RatVec> rational_kernel(const RatMat& M) {
    size_t m = M.size();
    size_t n = m == 0 ? 0 : M[0].size();
    if (n == 0) return {};
    RatMat W = M;
    std::vector<long> pivot_col_of_row;
    size_t row = 0;
    std::vector<bool> is_pivot_col(n, false);
    for (size_t col = 0; col < n && row < m; ++col) {
        size_t sel = row;
        while (sel < m && W[sel][col].is_zero()) ++sel;
        if (sel == m) continue;
        std::swap(W[sel], W[row]);
        Rat inv = Rat(1) / W[row][col];
        for (size_t j = col; j < n; ++j) W[row][j] = W[row][j] * inv;
        for (size_t i = 0; i < m; ++i) {
            if (i == row || W[i][col].is_zero()) continue;
            Rat f = W[i][col];
            for (size_t j = col; j < n; ++j) W[i][j] = W[i][j] - f * W[row][j];
        }
        pivot_col_of_row.push_back(static_cast<long>(col));
        is_pivot_col[col] = true;
        ++row;
    }
    std::vector<RatVec> basis;
    for (size_t free_col = 0; free_col < n; ++free_col) {
        if (is_pivot_col[free_col]) continue;
        RatVec v(n, Rat(0));
        v[free_col] = Rat(1);
        for (size_t r = 0; r < pivot_col_of_row.size(); ++r) {
            size_t pc = static_cast<size_t>(pivot_col_of_row[r]);
            v[pc] = -W[r][free_col];
        }
        // scale to integer entries for stable output
        Int l(1);
        for (auto& x : v) {
            Int g = gcd_int(l, x.den());
            l = l / g * x.den();
        }
        for (auto& x : v) x = x * Rat(l);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<DiophantineSolution> solve_exact_combination(const std::vector<ExactReal>& values,
                                                           const ExactReal& target) {
    if (values.empty()) {
        if (target.is_zero()) return DiophantineSolution{};
        return std::nullopt;
    }
    std::vector<ExactComplex> cvalues;
    ExactReal zero = ExactReal::from_rat(target.basis(), Rat(0));
    for (const auto& v : values) cvalues.push_back({v, zero});
    return solve_exact_combination_complex(cvalues, {target, zero});
}

namespace {

// Shared row builder: equations from one exact-real identity, appended to an
// integer system.
void append_coordinate_rows(const std::vector<ExactReal>& values, const ExactReal& target,
                            IntMat& A, IntVec& c) {
    size_t dim = target.coords().size();
    size_t n = values.size();
    for (size_t beta = 0; beta < dim; ++beta) {
        Int l(1);
        for (const auto& v : values) {
            Int g = gcd_int(l, v.coords()[beta].den());
            l = l / g * v.coords()[beta].den();
        }
        {
            Int g = gcd_int(l, target.coords()[beta].den());
            l = l / g * target.coords()[beta].den();
        }
        IntVec row(n);
        bool all_zero = true;
        for (size_t j = 0; j < n; ++j) {
            row[j] = (values[j].coords()[beta] * Rat(l)).num();
            if (row[j] != 0) all_zero = false;
        }
        Rat rhs = target.coords()[beta] * Rat(l);
        if (all_zero && rhs.is_zero()) continue;
        A.push_back(std::move(row));
        c.push_back(rhs.num());
    }
}

std::optional<DiophantineSolution> solve_from_rows(size_t n, const IntMat& A, const IntVec& c) {
    if (A.empty()) {
        DiophantineSolution sol;
        sol.particular.assign(n, Int(0));
        for (size_t j = 0; j < n; ++j) {
            IntVec v(n, Int(0));
            v[j] = 1;
            sol.lattice.push_back(std::move(v));
        }
        return sol;
    }
    return solve_linear_diophantine(A, c);
}

}  // namespace

std::optional<DiophantineSolution> solve_exact_combination_complex(
    const std::vector<ExactComplex>& values, const ExactComplex& target) {
    std::vector<ExactReal> re, im;
    for (const auto& v : values) {
        re.push_back(v.re);
        im.push_back(v.im);
    }
    IntMat A;
    IntVec c;
    append_coordinate_rows(re, target.re, A, c);
    append_coordinate_rows(im, target.im, A, c);
    return solve_from_rows(values.size(), A, c);
}

std::vector<RatVec> rational_solution_space(const std::vector<std::vector<ExactReal>>& M) {
    if (M.empty() || M[0].empty()) return {};
    size_t cols = M[0].size();
    size_t coord_dim = M[0][0].coords().size();
    RatMat constraints;
    for (const auto& mrow : M) {
        if (mrow.size() != cols) throw PreconditionViolation("ragged matrix");
        for (size_t beta = 1; beta < coord_dim; ++beta) {
            RatVec eq(cols);
            bool nonzero = false;
            for (size_t c = 0; c < cols; ++c) {
                eq[c] = mrow[c].coords()[beta];
                if (!eq[c].is_zero()) nonzero = true;
            }
            if (nonzero) constraints.push_back(std::move(eq));
        }
    }
    if (constraints.empty()) {
        // no irrational part anywhere: the full space solves
        std::vector<RatVec> basis;
        for (size_t j = 0; j < cols; ++j) {
            RatVec v(cols, Rat(0));
            v[j] = Rat(1);
            basis.push_back(std::move(v));
        }
        return basis;
    }
    return rational_kernel(constraints);
}

std::optional<std::pair<Int, Int>> canonical_bezout(const Int& p, const Int& q, const Int& m) {
    if (p == 0 && q == 0) {
        if (m == 0) return std::make_pair(Int(0), Int(0));
        return std::nullopt;
    }
    XGcd e = xgcd(p, q);
    Int rem;
    mpz_fdiv_r(rem.get_mpz_t(), m.get_mpz_t(), e.g.get_mpz_t());
    if (rem != 0) return std::nullopt;
    Int k = m / e.g;
    Int x0 = e.x * k, y0 = e.y * k;
    Int step_x = q / e.g;  // x = x0 + t*step_x, y = y0 - t*(p/g)
    if (step_x == 0) return std::make_pair(x0, y0);
    // minimize |x|
    Rat t_real = Rat(-x0, step_x);
    Int t = round_nearest(t_real);
    Int best_x = x0 + t * step_x;
    Int best_y = y0 - t * (p / e.g);
    for (long dt : {-1L, 1L}) {
        Int xx = x0 + (t + dt) * step_x;
        Int yy = y0 - (t + dt) * (p / e.g);
        Int ax, abx;
        mpz_abs(ax.get_mpz_t(), xx.get_mpz_t());
        mpz_abs(abx.get_mpz_t(), best_x.get_mpz_t());
        if (ax < abx || (ax == abx && xx > best_x)) {
            best_x = xx;
            best_y = yy;
        }
    }
    return std::make_pair(best_x, best_y);
}

}  // namespace hypotor
