// Slowly varying functions on a closed family
//   c * (log x)^a * (log log x)^b     (any factor optional)
// evaluated at either end of the scale: at infinity directly, at the origin
// through the reflection L~(x) = L(1/x). Inside the domain floor the closed
// form is frozen to its floor value, keeping every representative continuous
// and positive on (0, inf).
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qakit::svf {

enum class Locus { Infinity, Origin };

inline const char* to_string(Locus l) { return l == Locus::Infinity ? "infinity" : "origin"; }

class SlowlyVaryingFn {
  public:
    struct Factor {
        enum class Kind { Log, LogLog };
        Kind kind;
        double power;
    };

    // Grammar: spec := factor (" * " factor)*, factor := <positive number>
    // | "log" | "loglog" | "log^<p>" | "loglog^<p>". "1" is the constant
    // function one.
    static SlowlyVaryingFn parse(const std::string& spec, Locus at,
                                 double domain_floor = std::numeric_limits<double>::quiet_NaN()) {
        SlowlyVaryingFn L;
        L.locus_ = at;
        std::string token;
        std::istringstream in(spec);
        bool expect_factor = true;
        while (in >> token) {
            if (token == "*") {
                if (expect_factor) throw std::invalid_argument("svf: misplaced '*' in spec '" + spec + "'");
                expect_factor = true;
                continue;
            }
            if (!expect_factor)
                throw std::invalid_argument("svf: missing '*' between factors in spec '" + spec + "'");
            expect_factor = false;
            std::string name = token;
            double power = 1.0;
            if (auto caret = token.find('^'); caret != std::string::npos) {
                name = token.substr(0, caret);
                power = parse_number(token.substr(caret + 1), spec);
            }
            if (name == "log") {
                L.factors_.push_back({Factor::Kind::Log, power});
            } else if (name == "loglog") {
                L.factors_.push_back({Factor::Kind::LogLog, power});
            } else {
                const double c = parse_number(name, spec);
                if (!(c > 0.0)) throw std::invalid_argument("svf: constant factor must be positive in '" + spec + "'");
                L.constant_ *= c;
            }
        }
        if (expect_factor && !L.factors_.empty())
            throw std::invalid_argument("svf: trailing '*' in spec '" + spec + "'");
        L.floor_ = std::isnan(domain_floor) ? L.default_floor() : domain_floor;
        if (!(L.floor_ >= 0.0)) throw std::invalid_argument("svf: domain floor must be nonnegative");
        return L;
    }

    static SlowlyVaryingFn one(Locus at = Locus::Infinity) { return parse("1", at); }

    double operator()(double x) const {
        if (!(x > 0.0)) throw std::domain_error("svf: argument must be positive");
        const double y = (locus_ == Locus::Origin) ? 1.0 / x : x;
        return closed_form(std::max(y, floor_));
    }

    Locus locus() const { return locus_; }
    double domain_floor() const { return floor_; }
    bool is_constant() const { return factors_.empty(); }

    // Sum of |powers| of the log-type factors; governs how fast L(ax)/L(x)
    // approaches 1 (residual <= ~power_weight * log a / log x).
    double power_weight() const {
        double w = 0.0;
        for (const auto& f : factors_) w += std::fabs(f.power);
        return w;
    }

    std::string spec() const {
        std::ostringstream os;
        bool first = true;
        if (constant_ != 1.0 || factors_.empty()) {
            os << constant_;
            first = false;
        }
        for (const auto& f : factors_) {
            if (!first) os << " * ";
            first = false;
            os << (f.kind == Factor::Kind::Log ? "log" : "loglog") << "^" << f.power;
        }
        return os.str();
    }

  private:
    static double parse_number(const std::string& s, const std::string& spec) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("svf: bad number '" + s + "' in spec '" + spec + "'");
        }
        if (used != s.size())
            throw std::invalid_argument("svf: bad number '" + s + "' in spec '" + spec + "'");
        return v;
    }

    double default_floor() const {
        double f = 0.0;
        for (const auto& fac : factors_)
            f = std::max(f, fac.kind == Factor::Kind::LogLog ? std::exp(std::exp(1.0)) : std::exp(1.0));
        return f;
    }

    double closed_form(double y) const {
        double v = constant_;
        for (const auto& f : factors_) {
            const double base = (f.kind == Factor::Kind::Log) ? std::log(y) : std::log(std::log(y));
            v *= std::pow(base, f.power);
        }
        return v;
    }

    Locus locus_ = Locus::Infinity;
    double constant_ = 1.0;
    std::vector<Factor> factors_;
    double floor_ = 0.0;
};

// |L(a x_i)/L(x_i) - 1| along a ladder; the defining ratio-limit residuals.
inline std::vector<double> ratio_limit_check(const SlowlyVaryingFn& L, double a,
                                             const std::vector<double>& ladder) {
    if (!(a > 0.0)) throw std::invalid_argument("ratio_limit_check: a must be positive");
    std::vector<double> out;
    out.reserve(ladder.size());
    for (double x : ladder) out.push_back(std::fabs(L(a * x) / L(x) - 1.0));
    return out;
}

// ---------------------------------------------------------------------------
// Potter-type envelope: C = max over the grid of
//   L(lambda x) / ( L(lambda) * max(x^gamma, x^-gamma) ).
// x = 1 is always included, so C >= 1 whenever the grid is nonempty.
// ---------------------------------------------------------------------------
struct PotterReport {
    double gamma = 0.0;
    double C_gamma = 0.0;
    double argmax_lambda = 0.0;
    double argmax_x = 0.0;
    std::size_t points = 0;
};

inline PotterReport potter_constant(const SlowlyVaryingFn& L, double gamma,
                                    const std::vector<double>& lambda_grid,
                                    const std::vector<double>& x_grid) {
    if (!(gamma > 0.0)) throw std::invalid_argument("potter_constant: gamma must be positive");
    if (lambda_grid.empty() || x_grid.empty())
        throw std::invalid_argument("potter_constant: empty grid");
    PotterReport rep;
    rep.gamma = gamma;
    std::vector<double> xs = x_grid;
    xs.push_back(1.0);
    for (double lambda : lambda_grid) {
        const double denom_base = L(lambda);
        for (double x : xs) {
            const double env = std::max(std::pow(x, gamma), std::pow(x, -gamma));
            const double v = L(lambda * x) / (denom_base * env);
            ++rep.points;
            if (v > rep.C_gamma) {
                rep.C_gamma = v;
                rep.argmax_lambda = lambda;
                rep.argmax_x = x;
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// de Haan-type drift check for a primitive b against L:
//   residual(a, x) = ( b(ax) - b(x) - c_eff L(x) log a ) / L(x),
// with c_eff = c (-1)^{k-1} / (k-1)!. Converged means every a-row's residual
// magnitude is below tol at the far end of the ladder.
// ---------------------------------------------------------------------------
struct DeHaanReport {
    double c_effective = 0.0;
    std::vector<double> a_set;
    std::vector<double> ladder;
    std::vector<std::vector<double>> residuals;  // residuals[a_index][ladder_index]
    bool converged = false;
};

inline DeHaanReport dehaan_check(const std::function<double(double)>& b, const SlowlyVaryingFn& L,
                                 double c, unsigned k, const std::vector<double>& a_set,
                                 const std::vector<double>& x_ladder, double tol) {
    if (k == 0) throw std::invalid_argument("dehaan_check: k must be >= 1");
    if (a_set.empty() || x_ladder.empty()) throw std::invalid_argument("dehaan_check: empty grid");
    DeHaanReport rep;
    rep.a_set = a_set;
    rep.ladder = x_ladder;
    double c_eff = c;
    for (unsigned i = 1; i < k; ++i) c_eff /= static_cast<double>(i);
    if (k % 2 == 0) c_eff = -c_eff;
    rep.c_effective = c_eff;
    rep.converged = true;
    for (double a : a_set) {
        std::vector<double> row;
        row.reserve(x_ladder.size());
        for (double x : x_ladder) {
            const double Lx = L(x);
            row.push_back((b(a * x) - b(x) - c_eff * Lx * std::log(a)) / Lx);
        }
        if (std::fabs(row.back()) > tol) rep.converged = false;
        rep.residuals.push_back(std::move(row));
    }
    return rep;
}

}  // namespace qakit::svf
