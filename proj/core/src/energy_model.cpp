#include "wattline/energy_model.hpp"

#include <array>
#include <cmath>
#include <string>

#include "wattline/errors.hpp"
#include "wattline/numeric.hpp"

namespace wattline {

namespace {

constexpr const char* kColNames[3] = {"work", "traffic", "intercept"};

// Residual 2-norm below this fraction of the (unit) column norm means the
// column lies in the span of the previous ones.
constexpr double kRankTol = 1e-10;

} // namespace

EnergyCoefficients fit_energy_coefficients(const std::vector<MeasurementRecord>& records) {
    for (const auto& r : records) {
        validate(r);
    }
    const size_t n = records.size();

    // Raw design columns: W, Q, 1.
    std::array<std::vector<double>, 3> col;
    for (auto& c : col) {
        c.resize(n);
    }
    for (size_t i = 0; i < n; ++i) {
        col[0][i] = records[i].work_flop;
        col[1][i] = records[i].traffic_bytes;
        col[2][i] = 1.0;
    }

    // Drop identically-zero columns; their coefficient is pinned to zero.
    std::array<double, 3> norm{};
    std::vector<int> active;
    for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (double v : col[j]) {
            s += v * v;
        }
        norm[j] = std::sqrt(s);
        if (norm[j] > 0.0) {
            active.push_back(j);
        }
    }
    if (n < active.size()) {
        throw FitError("fit_energy_coefficients: " + std::to_string(active.size()) +
                       " free coefficients but only " + std::to_string(n) + " records");
    }

    // Modified Gram-Schmidt QR on unit-normalized active columns, with a
    // second orthogonalization pass for stability.
    std::vector<std::vector<double>> q;
    std::vector<std::vector<double>> r_rows; // r_rows[k][j]: row k of R
    for (size_t jj = 0; jj < active.size(); ++jj) {
        int j = active[jj];
        std::vector<double> v(n);
        for (size_t i = 0; i < n; ++i) {
            v[i] = col[j][i] / norm[j];
        }
        std::vector<double> rj(active.size(), 0.0);
        for (int pass = 0; pass < 2; ++pass) {
            for (size_t k = 0; k < q.size(); ++k) {
                double dot = 0.0;
                for (size_t i = 0; i < n; ++i) {
                    dot += q[k][i] * v[i];
                }
                rj[k] += dot;
                for (size_t i = 0; i < n; ++i) {
                    v[i] -= dot * q[k][i];
                }
            }
        }
        double vn = 0.0;
        for (double x : v) {
            vn += x * x;
        }
        vn = std::sqrt(vn);
        if (vn < kRankTol) {
            std::string deps;
            for (size_t k = 0; k < jj; ++k) {
                if (!deps.empty()) {
                    deps += ", ";
                }
                deps += kColNames[active[k]];
            }
            throw FitError(std::string("fit_energy_coefficients: column '") +
                           kColNames[j] + "' is linearly dependent on " + deps);
        }
        for (double& x : v) {
            x /= vn;
        }
        for (size_t k = 0; k < jj; ++k) {
            r_rows[k][jj] = rj[k];
        }
        r_rows.push_back(std::vector<double>(active.size(), 0.0));
        r_rows[jj][jj] = vn;
        q.push_back(std::move(v));
    }

    // Solve R y = Q^T E by back substitution, then unscale.
    std::vector<double> qtb(active.size(), 0.0);
    for (size_t k = 0; k < active.size(); ++k) {
        double dot = 0.0;
        for (size_t i = 0; i < n; ++i) {
            dot += q[k][i] * records[i].energy_j;
        }
        qtb[k] = dot;
    }
    std::vector<double> y(active.size(), 0.0);
    for (size_t k = active.size(); k-- > 0;) {
        double s = qtb[k];
        for (size_t j = k + 1; j < active.size(); ++j) {
            s -= r_rows[k][j] * y[j];
        }
        y[k] = s / r_rows[k][k];
    }

    std::array<double, 3> beta{0.0, 0.0, 0.0};
    for (size_t k = 0; k < active.size(); ++k) {
        beta[active[k]] = y[k] / norm[active[k]];
    }

    EnergyCoefficients c;
    c.eps_flop = beta[0];
    c.eps_mem = beta[1];
    c.e0 = beta[2];
    c.clamped = false;
    if (c.eps_flop < 0.0) {
        c.eps_flop = 0.0;
        c.clamped = true;
    }
    if (c.eps_mem < 0.0) {
        c.eps_mem = 0.0;
        c.clamped = true;
    }
    if (c.e0 < 0.0) {
        c.e0 = 0.0;
        c.clamped = true;
    }

    if (n > 0) {
        std::vector<double> sq(n);
        for (size_t i = 0; i < n; ++i) {
            double resid = records[i].energy_j -
                           predict_energy(c, records[i].work_flop, records[i].traffic_bytes);
            sq[i] = resid * resid;
        }
        c.residual_rms = std::sqrt(pairwise_sum(sq) / static_cast<double>(n));
    } else {
        c.residual_rms = 0.0;
    }
    return c;
}

double predict_energy(const EnergyCoefficients& c, double work_flop, double traffic_bytes) {
    if (!(work_flop >= 0.0) || !(traffic_bytes >= 0.0)) {
        throw DomainError("predict_energy: work and traffic must be non-negative");
    }
    return work_flop * c.eps_flop + traffic_bytes * c.eps_mem + c.e0;
}

} // namespace wattline
