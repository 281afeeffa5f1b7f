#include "altopf/lp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace altopf {

int LinearProgram::add_var(double lo, double up) {
    int index = n_vars++;
    objective.conservativeResize(n_vars);
    objective[index] = 0.0;
    var_lo.conservativeResize(n_vars);
    var_up.conservativeResize(n_vars);
    var_lo[index] = lo;
    var_up[index] = up;
    return index;
}

void LinearProgram::add_row(std::vector<int> idx, std::vector<double> coef, double lo,
                            double up, std::string name) {
    Row row;
    row.idx = std::move(idx);
    row.coef = std::move(coef);
    row.lo = lo;
    row.up = up;
    row.name = std::move(name);
    rows.push_back(std::move(row));
}

void LinearProgram::check_well_formed() const {
    if (objective.size() != n_vars || var_lo.size() != n_vars || var_up.size() != n_vars) {
        throw std::invalid_argument("lp: vector sizes disagree with n_vars");
    }
    for (int j = 0; j < n_vars; ++j) {
        if (var_lo[j] > var_up[j]) {
            throw std::invalid_argument("lp: variable " + std::to_string(j) +
                                        " has lower bound above upper bound");
        }
    }
    for (size_t r = 0; r < rows.size(); ++r) {
        const Row& row = rows[r];
        if (row.idx.size() != row.coef.size()) {
            throw std::invalid_argument("lp: row " + std::to_string(r) +
                                        " index/coefficient length mismatch");
        }
        if (row.lo > row.up) {
            throw std::invalid_argument("lp: row " + std::to_string(r) +
                                        " has lower bound above upper bound");
        }
        for (int j : row.idx) {
            if (j < 0 || j >= n_vars) {
                throw std::invalid_argument("lp: row " + std::to_string(r) +
                                            " references invalid variable " + std::to_string(j));
            }
        }
    }
}

double lp_violation(const LinearProgram& lp, const Vector& x) {
    double worst = 0.0;
    for (int j = 0; j < lp.n_vars; ++j) {
        worst = std::max(worst, lp.var_lo[j] - x[j]);
        worst = std::max(worst, x[j] - lp.var_up[j]);
    }
    for (const auto& row : lp.rows) {
        double activity = 0.0;
        for (size_t k = 0; k < row.idx.size(); ++k) activity += row.coef[k] * x[row.idx[k]];
        worst = std::max(worst, row.lo - activity);
        worst = std::max(worst, activity - row.up);
    }
    return worst;
}

namespace {

enum class VarState { Basic, AtLower, AtUpper, FreeZero };

/// Dense two-phase bounded-variable simplex working on [A | -I] z = 0,
/// where slack s_r = a_r . x carries the row bounds.
class Simplex {
public:
    Simplex(const LinearProgram& lp, const LpConfig& config, bool bland)
        : lp_(lp), config_(config), bland_(bland) {
        m_ = static_cast<int>(lp.rows.size());
        n_total_ = lp.n_vars + m_;
        W_ = Matrix::Zero(m_, n_total_);
        lo_.resize(n_total_);
        up_.resize(n_total_);
        cost_ = Vector::Zero(n_total_);
        cost_.head(lp.n_vars) = lp.objective;
        for (int j = 0; j < lp.n_vars; ++j) {
            lo_[j] = lp.var_lo[j];
            up_[j] = lp.var_up[j];
        }
        for (int r = 0; r < m_; ++r) {
            const auto& row = lp.rows[r];
            for (size_t k = 0; k < row.idx.size(); ++k) W_(r, row.idx[k]) += row.coef[k];
            W_(r, lp.n_vars + r) = -1.0;
            lo_[lp.n_vars + r] = row.lo;
            up_[lp.n_vars + r] = row.up;
        }
        d_tol_ = 1e-9 * std::max(1.0, cost_.cwiseAbs().maxCoeff());
    }

    LpSolution run() {
        LpSolution sol;
        init_basis();
        int degenerate_streak = 0;

        for (iter_ = 0; iter_ < config_.max_iters; ++iter_) {
            if (!compute_basics()) {
                sol.status = LpStatus::NumericalFailure;
                sol.iterations = iter_;
                return sol;
            }
            bool phase1 = max_infeasibility() > feas_eps_;
            Vector phase_cost = phase1 ? phase1_cost() : cost_;

            // Reduced costs for nonbasic columns.
            Vector y = lu_.transpose().solve(gather(phase_cost, basis_));
            int enter = -1;
            double enter_sign = 0.0;
            double best_score = 0.0;
            for (int j = 0; j < n_total_; ++j) {
                if (state_[j] == VarState::Basic) continue;
                if (up_[j] - lo_[j] < 1e-14 && state_[j] != VarState::FreeZero) continue;
                double dj = phase_cost[j] - y.dot(W_.col(j));
                double sign = 0.0;
                if ((state_[j] == VarState::AtLower || state_[j] == VarState::FreeZero) &&
                    dj < -d_tol_) {
                    sign = 1.0;
                } else if ((state_[j] == VarState::AtUpper || state_[j] == VarState::FreeZero) &&
                           dj > d_tol_) {
                    sign = -1.0;
                }
                if (sign == 0.0) continue;
                if (bland_) {
                    enter = j;
                    enter_sign = sign;
                    break;
                }
                if (std::abs(dj) > best_score + 1e-15) {
                    best_score = std::abs(dj);
                    enter = j;
                    enter_sign = sign;
                }
            }

            if (enter < 0) {
                if (phase1) {
                    sol.status = LpStatus::Infeasible;
                    sol.iterations = iter_;
                    return sol;
                }
                return finish(LpStatus::Optimal);
            }

            // Direction of basic values as the entering variable moves.
            Vector w = lu_.solve(W_.col(enter));
            double step = kInf;
            int leave_pos = -1; // position in basis
            double leave_bound = 0.0;
            bool leave_at_upper = false;

            for (int i = 0; i < m_; ++i) {
                double delta = -enter_sign * w[i]; // d x_B(i) / dt
                if (std::abs(delta) < 1e-11) continue;
                int bj = basis_[i];
                double value = beta_[i];
                double target = kInf;
                bool target_upper = false;
                if (delta > 0) {
                    if (phase1 && value < lo_[bj] - feas_eps_) {
                        target = lo_[bj];
                    } else if (!(phase1 && value > up_[bj] + feas_eps_) &&
                               std::isfinite(up_[bj])) {
                        target = up_[bj];
                        target_upper = true;
                    } else {
                        continue; // worsening an already-high variable: no breakpoint
                    }
                } else {
                    if (phase1 && value > up_[bj] + feas_eps_) {
                        target = up_[bj];
                        target_upper = true;
                    } else if (!(phase1 && value < lo_[bj] - feas_eps_) &&
                               std::isfinite(lo_[bj])) {
                        target = lo_[bj];
                    } else {
                        continue;
                    }
                }
                double t = std::max((target - value) / delta, 0.0);
                bool strict_win = t < step - 1e-14;
                bool tie_win = !strict_win && t < step + 1e-14 && leave_pos >= 0 &&
                               basis_[i] < basis_[leave_pos];
                if (strict_win || tie_win) {
                    step = std::min(step, t);
                    leave_pos = i;
                    leave_bound = target;
                    leave_at_upper = target_upper;
                }
            }

            double own_range = up_[enter] - lo_[enter];
            bool own_flip = std::isfinite(own_range) && own_range >= 0 && own_range <= step &&
                            state_[enter] != VarState::FreeZero;

            if (!own_flip && leave_pos < 0) {
                if (phase1) {
                    // The infeasibility measure is bounded below; a missing
                    // breakpoint is numerical trouble.
                    sol.status = LpStatus::NumericalFailure;
                    sol.iterations = iter_;
                    return sol;
                }
                sol.status = LpStatus::Unbounded;
                sol.iterations = iter_;
                return sol;
            }

            double actual_step = own_flip ? own_range : step;
            degenerate_streak = actual_step < 1e-12 ? degenerate_streak + 1 : 0;
            if (degenerate_streak > 100 && !bland_) bland_ = true;

            if (own_flip) {
                state_[enter] =
                    state_[enter] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
            } else {
                int leaving = basis_[leave_pos];
                value_[enter] = nonbasic_value(enter) + enter_sign * step;
                basis_[leave_pos] = enter;
                state_[enter] = VarState::Basic;
                state_[leaving] = leave_at_upper ? VarState::AtUpper : VarState::AtLower;
                value_[leaving] = leave_bound;
            }
        }
        sol.status = LpStatus::IterLimit;
        sol.iterations = iter_;
        return sol;
    }

private:
    static Vector gather(const Vector& v, const std::vector<int>& idx) {
        Vector out(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
        return out;
    }

    void init_basis() {
        basis_.resize(m_);
        state_.assign(n_total_, VarState::AtLower);
        value_.assign(n_total_, 0.0);
        for (int j = 0; j < lp_.n_vars; ++j) {
            if (std::isfinite(lo_[j])) {
                state_[j] = VarState::AtLower;
                value_[j] = lo_[j];
            } else if (std::isfinite(up_[j])) {
                state_[j] = VarState::AtUpper;
                value_[j] = up_[j];
            } else {
                state_[j] = VarState::FreeZero;
                value_[j] = 0.0;
            }
        }
        for (int r = 0; r < m_; ++r) {
            basis_[r] = lp_.n_vars + r;
            state_[lp_.n_vars + r] = VarState::Basic;
        }
    }

    double nonbasic_value(int j) const {
        switch (state_[j]) {
            case VarState::AtLower: return lo_[j];
            case VarState::AtUpper: return up_[j];
            case VarState::FreeZero: return 0.0;
            case VarState::Basic: return value_[j];
        }
        return 0.0;
    }

    /// Factorizes B and recomputes basic values; false on singular basis.
    bool compute_basics() {
        Matrix B(m_, m_);
        for (int i = 0; i < m_; ++i) B.col(i) = W_.col(basis_[i]);
        lu_.compute(B);
        // PartialPivLU has no rank query; check pivots directly.
        double min_pivot = m_ == 0 ? 1.0 : lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (m_ > 0 && (!std::isfinite(min_pivot) || min_pivot < 1e-12)) return false;

        Vector rhs = Vector::Zero(m_);
        for (int j = 0; j < n_total_; ++j) {
            if (state_[j] == VarState::Basic) continue;
            double v = nonbasic_value(j);
            if (v != 0.0) rhs.noalias() -= W_.col(j) * v;
        }
        beta_ = lu_.solve(rhs);
        for (int i = 0; i < m_; ++i) value_[basis_[i]] = beta_[i];
        return beta_.allFinite();
    }

    double max_infeasibility() const {
        double worst = 0.0;
        for (int i = 0; i < m_; ++i) {
            int j = basis_[i];
            worst = std::max(worst, lo_[j] - beta_[i]);
            worst = std::max(worst, beta_[i] - up_[j]);
        }
        return worst;
    }

    Vector phase1_cost() const {
        Vector c = Vector::Zero(n_total_);
        for (int i = 0; i < m_; ++i) {
            int j = basis_[i];
            if (beta_[i] > up_[j] + feas_eps_) c[j] = 1.0;
            else if (beta_[i] < lo_[j] - feas_eps_) c[j] = -1.0;
        }
        return c;
    }

    LpSolution finish(LpStatus status) {
        LpSolution sol;
        sol.status = status;
        sol.iterations = iter_;
        sol.x.resize(lp_.n_vars);
        for (int j = 0; j < lp_.n_vars; ++j) {
            sol.x[j] = state_[j] == VarState::Basic ? value_[j] : nonbasic_value(j);
        }
        sol.objective = lp_.objective.dot(sol.x) + lp_.objective_constant;
        sol.max_violation = lp_violation(lp_, sol.x);
        return sol;
    }

    const LinearProgram& lp_;
    LpConfig config_;
    bool bland_ = false;
    int m_ = 0;
    int n_total_ = 0;
    int iter_ = 0;
    Matrix W_;
    Vector lo_, up_, cost_, beta_;
    std::vector<int> basis_;
    std::vector<VarState> state_;
    std::vector<double> value_;
    Eigen::PartialPivLU<Matrix> lu_;
    double d_tol_ = 1e-9;
    double feas_eps_ = 1e-9;
};

} // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpConfig& config) {
    lp.check_well_formed();

    // Trivial case: no constraints at all reduces to bound inspection.
    if (lp.rows.empty() && lp.n_vars == 0) {
        LpSolution sol;
        sol.status = LpStatus::Optimal;
        sol.x.resize(0);
        sol.objective = lp.objective_constant;
        return sol;
    }

    LpSolution sol = Simplex(lp, config, /*bland=*/false).run();
    if (sol.status == LpStatus::NumericalFailure || sol.status == LpStatus::IterLimit) {
        LpSolution retry = Simplex(lp, config, /*bland=*/true).run();
        if (retry.status == LpStatus::Optimal || retry.status == LpStatus::Infeasible ||
            retry.status == LpStatus::Unbounded) {
            return retry;
        }
        return sol.status == LpStatus::IterLimit ? sol : retry;
    }
    return sol;
}

std::string write_lp_format(const LinearProgram& lp,
                            const std::vector<std::string>& var_names) {
    auto name = [&](int j) {
        if (j < static_cast<int>(var_names.size()) && !var_names[j].empty()) {
            std::string out = var_names[j];
            for (char& c : out) {
                if (c == '[' ) c = '(';
                if (c == ']') c = ')';
                if (c == ' ') c = '_';
            }
            return out;
        }
        return "x" + std::to_string(j);
    };

    std::ostringstream os;
    os << "\\ altopf LP dump\nMinimize\n obj:";
    bool first = true;
    for (int j = 0; j < lp.n_vars; ++j) {
        if (lp.objective[j] == 0.0) continue;
        double c = lp.objective[j];
        os << (c < 0 ? " - " : (first ? " " : " + ")) << std::abs(c) << " " << name(j);
        first = false;
    }
    if (first) os << " 0 " << (lp.n_vars > 0 ? name(0) : "x0");
    os << "\nSubject To\n";
    int counter = 0;
    for (const auto& row : lp.rows) {
        std::string rname = row.name.empty() ? "c" + std::to_string(counter) : row.name;
        ++counter;
        auto body = [&]() {
            std::ostringstream b;
            bool f = true;
            for (size_t k = 0; k < row.idx.size(); ++k) {
                double c = row.coef[k];
                if (c == 0.0) continue;
                b << (c < 0 ? " - " : (f ? " " : " + ")) << std::abs(c) << " "
                  << name(row.idx[k]);
                f = false;
            }
            if (f) b << " 0 " << name(0);
            return b.str();
        };
        if (row.lo == row.up) {
            os << " " << rname << ":" << body() << " = " << row.lo << "\n";
        } else {
            if (std::isfinite(row.lo)) os << " " << rname << "_l:" << body() << " >= " << row.lo << "\n";
            if (std::isfinite(row.up)) os << " " << rname << "_u:" << body() << " <= " << row.up << "\n";
        }
    }
    os << "Bounds\n";
    for (int j = 0; j < lp.n_vars; ++j) {
        double lo = lp.var_lo[j], up = lp.var_up[j];
        if (!std::isfinite(lo) && !std::isfinite(up)) {
            os << " " << name(j) << " free\n";
        } else if (lo == up) {
            os << " " << name(j) << " = " << lo << "\n";
        } else {
            if (std::isfinite(lo)) os << " " << lo << " <= " << name(j) << "\n";
            if (std::isfinite(up)) os << " " << name(j) << " <= " << up << "\n";
        }
    }
    os << "End\n";
    return os.str();
}

} // namespace altopf
