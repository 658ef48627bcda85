#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exponents.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace fd {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// INI-style configuration.  Sections: [params], [potential], [solver],
/// [sweep], [fraclap], [output]; `seed` may sit at the top level.
struct ExperimentConfig {
    int N = 1;
    Rational s{2, 5};
    Rational p{3};
    double eps = 0.1;

    PotentialSpec potential = PotentialSpec::constant_well(0.5);
    std::optional<Rational> omega;  ///< exact decay rate for power/tabulated kinds
    std::string table_path;

    SolverSettings solver;

    std::vector<Rational> sweep_p, sweep_omega;
    std::vector<double> sweep_eps;

    std::vector<double> mu{1.0};
    std::vector<double> radii{0.0, 1.0, 10.0, 100.0};
    double lambda = 1.0;

    std::string out_dir = "out";
    bool csv = true;
    bool plot = false;
    std::uint64_t seed = 1;

    ProblemParams params() const;
    /// Decay class of the configured potential, exact when omega is rational.
    DecayClass decay_class() const;
    /// The potential with omega replaced (power and tabulated kinds only).
    PotentialSpec potential_with_omega(const Rational& w) const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");

/// Comma list or lo:hi:count (count points, linear).
std::vector<Rational> parse_rational_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

/// Reference of all recognized keys with defaults.
std::string config_reference();

}  // namespace fd
