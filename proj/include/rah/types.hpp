#ifndef RAH_TYPES_HPP
#define RAH_TYPES_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rah {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when a numerical run cannot continue (non-finite field, bad jump map, ...).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_same_dimension(const Vector& a, const Vector& b, const char* where)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

/// Flow integration settings. Tolerances follow the defaults of the reach-avoid runs.
struct IntegratorSettings {
    double rtol = 1e-9;
    double atol = 1e-11;
    double initial_step = 1e-3;
    double min_step = 1e-13;
    double max_step = 0.25;
    double event_tol = 1e-10;      ///< width of the time bracket returned by event localization
    double sample_interval = 0.01; ///< dense-output sampling grid
    int guard_subsamples = 4;      ///< interior dense-output points checked per step
    bool fixed_step = false;
    double fixed_step_size = 1e-2;
};

/// Termination and guard settings for hybrid runs.
struct StopSettings {
    double t_max = 100.0;
    long j_max = 1000;
    double eps_stop = 1e-8;    ///< stop ball radius for the virtual state
    double z_tol = 1e-3;       ///< output convergence radius for coupled runs
    long zeno_max_jumps = -1;  ///< total jump cap; negative means 10 * number of obstacles
    double zeno_window = 1e-6;
    int zeno_burst = 2;        ///< more than this many jumps inside zeno_window aborts
};

} // namespace rah

#endif // RAH_TYPES_HPP
