#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "icode/types.hpp"

namespace icode {

enum class SystemKind { LotkaVolterra, Lorenz96, ReactionDiffusion };

enum class IntegratorKind { Euler, RK4 };

std::string to_string(SystemKind k);
SystemKind system_kind_from_string(const std::string& s);
std::string to_string(IntegratorKind k);
IntegratorKind integrator_from_string(const std::string& s);

/// Parameters of the competitive multi-species population model:
///   dx_i/dt = r_i x_i (1 - (beta x)_i / K_i).
struct LotkaVolterraParams {
  Vector r;     // per-species growth rates
  Vector K;     // carrying capacities, strictly positive
  Matrix beta;  // beta(i,j): effect of species j on species i
};

/// Ground-truth dynamical system description.
struct SystemSpec {
  SystemKind kind = SystemKind::Lorenz96;
  int p = 20;
  double forcing = 10.0;    // Lorenz-96 only
  LotkaVolterraParams lv;   // Lotka-Volterra only

  /// Throws ValidationError naming the violated constraint.
  void validate() const;

  static SystemSpec lorenz96(int p, double forcing = 10.0);
  static SystemSpec reaction_diffusion(int p);
  /// Random sparse interactions: beta_ii = 1, off-diagonals nonzero with
  /// probability 0.2 drawn uniform in [-0.1, 0.1]; r in [0.5, 1.5] and
  /// K in [5, 15], all from the given seed.
  static SystemSpec lotka_volterra(int p, std::uint64_t seed);
};

/// p-by-p adjacency; entry (i,j) true iff variable j enters the governing
/// equation of variable i.
struct DependencyGraph {
  BoolMatrix adjacency;

  int size() const { return static_cast<int>(adjacency.rows()); }
  bool edge(int i, int j) const { return adjacency(i, j); }
};

/// Time-indexed states, one row per sample.
struct Trajectory {
  Vector times;   // length T, monotonically increasing
  Matrix states;  // T x p

  Index samples() const { return states.rows(); }
  int vars() const { return static_cast<int>(states.cols()); }
};

/// dx/dt at state x per the system's governing equations (ring indexing for
/// Lorenz-96 and the reaction-diffusion chain). Rejects non-finite input.
Vector derivative(const SystemSpec& spec, const Vector& x);

/// Fixed-step integration; the result has steps+1 rows and row 0 == x0.
/// Throws DivergenceError naming the step when any |value| exceeds 1e12.
Trajectory integrate(const SystemSpec& spec, const Vector& x0, double dt, Index steps,
                     IntegratorKind method = IntegratorKind::RK4);

/// Same stepper with a caller-supplied derivative; f receives the index of
/// the sample the step starts from. Used for anomalous dynamics.
using StepDerivative = std::function<Vector(Index step, const Vector& x)>;
Trajectory integrate_with(const StepDerivative& f, const Vector& x0, double dt, Index steps,
                          IntegratorKind method);

DependencyGraph ground_truth_graph(const SystemSpec& spec);

/// Adds iid zero-mean Gaussian sensor noise of standard deviation sigma to
/// every entry. sigma == 0 returns a bit-identical copy.
Trajectory add_sensor_noise(const Trajectory& traj, double sigma, std::uint64_t seed);

/// Seeded initial condition near each system's operating region.
Vector default_initial_state(const SystemSpec& spec, std::uint64_t seed);

}  // namespace icode
