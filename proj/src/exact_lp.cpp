#include <stickbreak/exact_lp.hpp>

#include <stdexcept>

namespace stickbreak
{

void LinearSystem::add_row(std::vector<Rational> coeffs, Rational bound)
{
    if (coeffs.size() != vars) {
        throw std::invalid_argument("row width does not match the number of variables");
    }
    rows.push_back(std::move(coeffs));
    rhs.push_back(std::move(bound));
}

namespace
{

// Dictionary x_B(i) = value[i] + sum_j coef[i][j] x_N(j), objective
// z = z0 + sum_j obj[j] x_N(j). Variable ids: 0 is the auxiliary x0, 1..vars
// the originals, vars+1.. the slacks.
class Dictionary
{
public:
    explicit Dictionary(const LinearSystem &sys)
        : vars_(sys.vars), basic_(sys.rows.size()), nonbasic_(sys.vars + 1), value_(sys.rhs),
          coef_(sys.rows.size(), std::vector<Rational>(sys.vars + 1)), obj_(sys.vars + 1)
    {
        for (std::size_t j = 0; j <= vars_; ++j) {
            nonbasic_[j] = j;
        }
        for (std::size_t i = 0; i < sys.rows.size(); ++i) {
            basic_[i] = vars_ + 1 + i;
            coef_[i][0] = 1;
            for (std::size_t j = 0; j < vars_; ++j) {
                coef_[i][j + 1] = -sys.rows[i][j];
            }
        }
        obj_[0] = -1;
    }

    std::optional<std::vector<Rational>> solve()
    {
        std::size_t worst = basic_.size();
        for (std::size_t i = 0; i < basic_.size(); ++i) {
            if (sgn(value_[i]) < 0 && (worst == basic_.size() || value_[i] < value_[worst])) {
                worst = i;
            }
        }
        if (worst != basic_.size()) {
            pivot(worst, 0);
            while (step()) {
            }
            if (sgn(z0_) != 0) {
                return std::nullopt;
            }
        }
        std::vector<Rational> x(vars_);
        for (std::size_t i = 0; i < basic_.size(); ++i) {
            if (basic_[i] >= 1 && basic_[i] <= vars_) {
                x[basic_[i] - 1] = value_[i];
            }
        }
        return x;
    }

private:
    // One Bland's-rule iteration; false at optimum.
    bool step()
    {
        std::size_t enter = nonbasic_.size();
        for (std::size_t j = 0; j < nonbasic_.size(); ++j) {
            if (sgn(obj_[j]) > 0 && (enter == nonbasic_.size() || nonbasic_[j] < nonbasic_[enter])) {
                enter = j;
            }
        }
        if (enter == nonbasic_.size()) {
            return false;
        }
        std::size_t leave = basic_.size();
        Rational best, ratio;
        for (std::size_t i = 0; i < basic_.size(); ++i) {
            if (sgn(coef_[i][enter]) >= 0) {
                continue;
            }
            ratio = value_[i] / -coef_[i][enter];
            if (leave == basic_.size() || ratio < best || (ratio == best && basic_[i] < basic_[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == basic_.size()) {
            // The auxiliary objective -x0 is bounded by 0.
            throw std::logic_error("phase-one simplex reported unbounded");
        }
        pivot(leave, enter);
        return true;
    }

    void pivot(std::size_t row, std::size_t col)
    {
        auto &r = coef_[row];
        const Rational inv = 1 / r[col];
        // Solve row for the entering variable.
        value_[row] = -value_[row] * inv;
        for (std::size_t j = 0; j < r.size(); ++j) {
            r[j] = j == col ? inv : Rational(-r[j] * inv);
        }
        auto substitute = [&](Rational &constant, std::vector<Rational> &c) {
            const Rational f = c[col];
            if (sgn(f) == 0) {
                return;
            }
            constant += f * value_[row];
            for (std::size_t j = 0; j < c.size(); ++j) {
                if (j == col) {
                    c[j] = f * r[j];
                } else if (sgn(r[j]) != 0) {
                    c[j] += f * r[j];
                }
            }
        };
        for (std::size_t i = 0; i < coef_.size(); ++i) {
            if (i != row) {
                substitute(value_[i], coef_[i]);
            }
        }
        substitute(z0_, obj_);
        std::swap(basic_[row], nonbasic_[col]);
    }

    std::size_t vars_;
    std::vector<std::size_t> basic_;
    std::vector<std::size_t> nonbasic_;
    std::vector<Rational> value_;
    std::vector<std::vector<Rational>> coef_;
    std::vector<Rational> obj_;
    Rational z0_ = 0;
};

} // namespace

std::optional<std::vector<Rational>> find_feasible_point(const LinearSystem &sys)
{
    if (sys.rows.size() != sys.rhs.size()) {
        throw std::invalid_argument("row and bound counts differ");
    }
    return Dictionary(sys).solve();
}

} // namespace stickbreak
