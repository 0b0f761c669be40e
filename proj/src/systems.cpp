#include "icode/systems.hpp"

#include <cmath>
#include <random>
#include <string>

namespace icode {

namespace {

constexpr double kDivergenceLimit = 1e12;

int wrap(int i, int p) { return ((i % p) + p) % p; }

}  // namespace

std::string to_string(SystemKind k) {
  switch (k) {
    case SystemKind::LotkaVolterra: return "lotka_volterra";
    case SystemKind::Lorenz96: return "lorenz96";
    case SystemKind::ReactionDiffusion: return "reaction_diffusion";
  }
  return "unknown";
}

SystemKind system_kind_from_string(const std::string& s) {
  if (s == "lotka_volterra") return SystemKind::LotkaVolterra;
  if (s == "lorenz96") return SystemKind::Lorenz96;
  if (s == "reaction_diffusion") return SystemKind::ReactionDiffusion;
  throw ValidationError("unknown system kind '" + s + "'");
}

std::string to_string(IntegratorKind k) {
  return k == IntegratorKind::Euler ? "euler" : "rk4";
}

IntegratorKind integrator_from_string(const std::string& s) {
  if (s == "euler") return IntegratorKind::Euler;
  if (s == "rk4") return IntegratorKind::RK4;
  throw ValidationError("unknown integrator '" + s + "'");
}

void SystemSpec::validate() const {
  if (p < 1) throw ValidationError("system.p must be >= 1");
  if (kind == SystemKind::Lorenz96 && p < 4) {
    throw ValidationError("lorenz96 requires p >= 4 so indices i-2, i-1, i+1 are distinct");
  }
  if (kind == SystemKind::LotkaVolterra) {
    if (lv.r.size() != p || lv.K.size() != p || lv.beta.rows() != p || lv.beta.cols() != p) {
      throw ValidationError("lotka_volterra parameter sizes do not match p");
    }
    if ((lv.K.array() <= 0.0).any()) {
      throw ValidationError("lotka_volterra carrying capacities K must be strictly positive");
    }
  }
}

SystemSpec SystemSpec::lorenz96(int p, double forcing) {
  SystemSpec s;
  s.kind = SystemKind::Lorenz96;
  s.p = p;
  s.forcing = forcing;
  s.validate();
  return s;
}

SystemSpec SystemSpec::reaction_diffusion(int p) {
  SystemSpec s;
  s.kind = SystemKind::ReactionDiffusion;
  s.p = p;
  s.validate();
  return s;
}

SystemSpec SystemSpec::lotka_volterra(int p, std::uint64_t seed) {
  SystemSpec s;
  s.kind = SystemKind::LotkaVolterra;
  s.p = p;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> r_dist(0.5, 1.5);
  std::uniform_real_distribution<double> k_dist(5.0, 15.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> beta_dist(-0.1, 0.1);

  s.lv.r = Vector(p);
  for (int i = 0; i < p; ++i) s.lv.r(i) = r_dist(rng);
  s.lv.K = Vector(p);
  for (int i = 0; i < p; ++i) s.lv.K(i) = k_dist(rng);
  s.lv.beta = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (i == j) {
        s.lv.beta(i, j) = 1.0;
      } else if (unit(rng) < 0.2) {
        s.lv.beta(i, j) = beta_dist(rng);
      }
    }
  }
  s.validate();
  return s;
}

Vector derivative(const SystemSpec& spec, const Vector& x) {
  if (x.size() != spec.p) {
    throw ShapeError("derivative: state has length " + std::to_string(x.size()) +
                     ", system expects " + std::to_string(spec.p));
  }
  if (!x.allFinite()) throw ValidationError("derivative: non-finite state");

  const int p = spec.p;
  Vector dx(p);
  switch (spec.kind) {
    case SystemKind::LotkaVolterra: {
      const Vector load = spec.lv.beta * x;
      dx = spec.lv.r.array() * x.array() * (1.0 - load.array() / spec.lv.K.array());
      break;
    }
    case SystemKind::Lorenz96: {
      for (int i = 0; i < p; ++i) {
        dx(i) = (x(wrap(i + 1, p)) - x(wrap(i - 2, p))) * x(wrap(i - 1, p)) - x(i) + spec.forcing;
      }
      break;
    }
    case SystemKind::ReactionDiffusion: {
      for (int i = 0; i < p; ++i) {
        const double xm = x(wrap(i - 1, p));
        const double xp = x(wrap(i + 1, p));
        dx(i) = (xm - x(i)) + (xp - x(i)) + x(i) * (1.0 - x(i));
      }
      break;
    }
  }
  return dx;
}

Trajectory integrate_with(const StepDerivative& f, const Vector& x0, double dt, Index steps,
                          IntegratorKind method) {
  if (dt <= 0.0) throw ValidationError("integrate: dt must be positive");
  if (!x0.allFinite()) throw ValidationError("integrate: non-finite initial state");

  Trajectory traj;
  traj.times = Vector(steps + 1);
  traj.states = Matrix(steps + 1, x0.size());
  traj.states.row(0) = x0.transpose();
  traj.times(0) = 0.0;

  Vector x = x0;
  for (Index s = 0; s < steps; ++s) {
    if (method == IntegratorKind::Euler) {
      x += dt * f(s, x);
    } else {
      const Vector k1 = f(s, x);
      const Vector k2 = f(s, x + (0.5 * dt) * k1);
      const Vector k3 = f(s, x + (0.5 * dt) * k2);
      const Vector k4 = f(s, x + dt * k3);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceLimit) {
      throw DivergenceError("integration diverged at step " + std::to_string(s + 1));
    }
    traj.states.row(s + 1) = x.transpose();
    traj.times(s + 1) = static_cast<double>(s + 1) * dt;
  }
  return traj;
}

Trajectory integrate(const SystemSpec& spec, const Vector& x0, double dt, Index steps,
                     IntegratorKind method) {
  spec.validate();
  return integrate_with([&spec](Index, const Vector& x) { return derivative(spec, x); }, x0, dt,
                        steps, method);
}

DependencyGraph ground_truth_graph(const SystemSpec& spec) {
  spec.validate();
  const int p = spec.p;
  DependencyGraph g;
  g.adjacency = BoolMatrix::Constant(p, p, false);
  switch (spec.kind) {
    case SystemKind::LotkaVolterra:
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          g.adjacency(i, j) = (i == j) || spec.lv.beta(i, j) != 0.0;
        }
      }
      break;
    case SystemKind::Lorenz96:
      for (int i = 0; i < p; ++i) {
        g.adjacency(i, wrap(i - 2, p)) = true;
        g.adjacency(i, wrap(i - 1, p)) = true;
        g.adjacency(i, i) = true;
        g.adjacency(i, wrap(i + 1, p)) = true;
      }
      break;
    case SystemKind::ReactionDiffusion:
      for (int i = 0; i < p; ++i) {
        g.adjacency(i, wrap(i - 1, p)) = true;
        g.adjacency(i, i) = true;
        g.adjacency(i, wrap(i + 1, p)) = true;
      }
      break;
  }
  return g;
}

Trajectory add_sensor_noise(const Trajectory& traj, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw ValidationError("add_sensor_noise: sigma must be >= 0");
  Trajectory out = traj;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (Index r = 0; r < out.states.rows(); ++r) {
    for (Index c = 0; c < out.states.cols(); ++c) {
      out.states(r, c) += noise(rng);
    }
  }
  return out;
}

Vector default_initial_state(const SystemSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  Vector x0(spec.p);
  switch (spec.kind) {
    case SystemKind::Lorenz96: {
      std::uniform_real_distribution<double> perturb(-0.5, 0.5);
      for (int i = 0; i < spec.p; ++i) x0(i) = spec.forcing + perturb(rng);
      break;
    }
    case SystemKind::ReactionDiffusion: {
      std::uniform_real_distribution<double> u(0.1, 0.9);
      for (int i = 0; i < spec.p; ++i) x0(i) = u(rng);
      break;
    }
    case SystemKind::LotkaVolterra: {
      std::uniform_real_distribution<double> u(0.5, 1.0);
      for (int i = 0; i < spec.p; ++i) x0(i) = spec.lv.K(i) * u(rng);
      break;
    }
  }
  return x0;
}

}  // namespace icode
