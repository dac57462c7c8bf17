#pragma once

// Configuration data model and validation. Configs are unit-annotated
// structured text (see docs/config_format.md); everything is converted to SI
// on load and held at working precision.

#include "qpc/numerics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qpc {

struct PhysicalConstants {
    Real mass;     // kg
    Real hbar;     // J*s
    Real v_z;      // m/s, longitudinal velocity (classical axis)

    void validate() const;
};

struct SetupGeometry {
    int num_planes = 0;                          // N, detector included
    std::vector<std::vector<Real>> slit_centers; // per plane j in [1, N-1], ascending, meters
    std::vector<Real> slit_half_widths;          // beta_j, meters
    std::vector<Real> plane_distances;           // L_{j-1,j} for j in [1, N], meters
    Real source_width;                           // sigma_0, meters
    Real separation_factor{1};                   // alpha >= 1
    Real overlap_threshold{Real("1e-6")};        // lint bound on slit-window overlap

    int slit_count(int plane) const { return static_cast<int>(slit_centers.at(plane).size()); }
    void validate() const; // throws std::invalid_argument naming plane/slit on failure
};

struct NoiseConfig {
    std::optional<Real> snr_db; // uniform sigma derived from mean signal power
    std::optional<Real> sigma;  // explicit per-sample deviation (overrides snr)
    Real sigma_max{0};          // 0 = unbounded
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    Real sampling_interval;       // T_s, meters
    long k_min = 0;
    long k_max = 0;
    int exotic_order = 0;         // N_E
    PrecisionPolicy precision;
    std::optional<NoiseConfig> noise;
    std::uint64_t rng_seed = 1;
    std::uint64_t path_cap = 1000000;
    std::vector<Real> d_override; // empty = derive from the coupling model

    void validate() const;
};

struct TimeSchedule {
    std::vector<Real> leg;        // t_{j-1,j} = L_{j-1,j} / v_z
    std::vector<Real> cumulative; // t_j

    void validate() const;
};

struct Config {
    PhysicalConstants constants;
    SetupGeometry geometry;
    ExperimentConfig experiment;
    std::string source_text; // raw bytes, for the run-manifest digest
};

// Parse + validate. Throws ConfigParseError for syntax/unit problems and
// std::invalid_argument for invariant violations.
Config load_config(const std::string& path);
Config parse_config_text(const std::string& text);

struct ConfigParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TimeSchedule derive_schedule(const SetupGeometry& geom, const PhysicalConstants& consts);

// Serializes back to config text reproducing identical SI values on reload.
std::string config_to_text(const Config& cfg);

} // namespace qpc
