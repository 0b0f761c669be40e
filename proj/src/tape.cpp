#include "icode/tape.hpp"

#include <cmath>
#include <sstream>

namespace icode::ad {

namespace {

std::string dims(const Tensor& t) { return t.shape_str(); }

[[noreturn]] void shape_fail(const std::string& op, const Tensor& a, const Tensor& b) {
  throw ShapeError(op + ": incompatible shapes " + dims(a) + " and " + dims(b));
}

}  // namespace

Tensor Tensor::scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return Tensor(std::move(m), 1);
}

Tensor Tensor::vector(Vector v) {
  Matrix m(v.size(), 1);
  m.col(0) = v;
  return Tensor(std::move(m), 1);
}

Tensor Tensor::matrix(Matrix m) { return Tensor(std::move(m), 2); }

Tensor Tensor::zeros(Index rows, Index cols) { return Tensor(Matrix::Zero(rows, cols), 2); }

Tensor Tensor::zeros_like(const Tensor& t) {
  return Tensor(Matrix::Zero(t.rows(), t.cols()), t.rank());
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  if (rank_ == 1) {
    os << "(" << rows() << ")";
  } else {
    os << "(" << rows() << "x" << cols() << ")";
  }
  return os.str();
}

double Tensor::scalar_value() const {
  if (size() != 1) throw ShapeError("scalar_value: tensor has shape " + shape_str());
  return data_(0, 0);
}

Vector Tensor::as_vector() const {
  if (rank_ != 1) throw ShapeError("as_vector: tensor has shape " + shape_str());
  return data_.col(0);
}

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::variable(const std::string& name, Tensor value) {
  if (variables_.count(name) != 0) {
    throw ValidationError("tape: variable '" + name + "' registered twice");
  }
  Node n;
  n.op = Op::Variable;
  n.value = std::move(value);
  Var v = push(std::move(n));
  variables_[name] = v.id();
  return v;
}

Var Tape::constant(Tensor value) {
  Node n;
  n.op = Op::Constant;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  const Tensor& va = val(a.id());
  const Tensor& vb = val(b.id());
  if (!va.same_shape(vb)) shape_fail("add", va, vb);
  Node n;
  n.op = Op::Add;
  n.a = a.id();
  n.b = b.id();
  Tensor out = va;
  out.data() += vb.data();
  n.value = std::move(out);
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  const Tensor& va = val(a.id());
  const Tensor& vb = val(b.id());
  if (!va.same_shape(vb)) shape_fail("sub", va, vb);
  Node n;
  n.op = Op::Sub;
  n.a = a.id();
  n.b = b.id();
  Tensor out = va;
  out.data() -= vb.data();
  n.value = std::move(out);
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const Tensor& va = val(a.id());
  const Tensor& vb = val(b.id());
  if (!va.same_shape(vb)) shape_fail("mul", va, vb);
  Node n;
  n.op = Op::Mul;
  n.a = a.id();
  n.b = b.id();
  Tensor out = va;
  out.data() = va.data().cwiseProduct(vb.data());
  n.value = std::move(out);
  return push(std::move(n));
}

Var Tape::scalar_mul(double c, Var a) {
  const Tensor& va = val(a.id());
  Node n;
  n.op = Op::ScalarMul;
  n.a = a.id();
  n.coeff = c;
  Tensor out = va;
  out.data() *= c;
  n.value = std::move(out);
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& va = val(a.id());
  const Tensor& vb = val(b.id());
  if (va.rank() != 2 || vb.rank() != 2 || va.cols() != vb.rows()) {
    shape_fail("matmul", va, vb);
  }
  Node n;
  n.op = Op::MatMul;
  n.a = a.id();
  n.b = b.id();
  n.value = Tensor::matrix(va.data() * vb.data());
  return push(std::move(n));
}

Var Tape::matvec(Var a, Var x) {
  const Tensor& va = val(a.id());
  const Tensor& vx = val(x.id());
  if (va.rank() != 2 || vx.rank() != 1 || va.cols() != vx.rows()) {
    shape_fail("matvec", va, vx);
  }
  Node n;
  n.op = Op::MatVec;
  n.a = a.id();
  n.b = x.id();
  n.value = Tensor::vector(va.data() * vx.data().col(0));
  return push(std::move(n));
}

Var Tape::tanh(Var a) {
  const Tensor& va = val(a.id());
  Node n;
  n.op = Op::Tanh;
  n.a = a.id();
  Tensor out = va;
  out.data() = va.data().array().tanh().matrix();
  n.value = std::move(out);
  return push(std::move(n));
}

Var Tape::abs(Var a) {
  const Tensor& va = val(a.id());
  Node n;
  n.op = Op::Abs;
  n.a = a.id();
  Tensor out = va;
  out.data() = va.data().cwiseAbs();
  n.value = std::move(out);
  return push(std::move(n));
}

Var Tape::square(Var a) {
  const Tensor& va = val(a.id());
  Node n;
  n.op = Op::Square;
  n.a = a.id();
  Tensor out = va;
  out.data() = va.data().cwiseProduct(va.data());
  n.value = std::move(out);
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  Node n;
  n.op = Op::Sum;
  n.a = a.id();
  n.value = Tensor::scalar(val(a.id()).data().sum());
  return push(std::move(n));
}

Var Tape::mean(Var a) {
  Node n;
  n.op = Op::Mean;
  n.a = a.id();
  n.value = Tensor::scalar(val(a.id()).data().mean());
  return push(std::move(n));
}

Var Tape::reshape(Var a, Index rows, Index cols) {
  const Tensor& va = val(a.id());
  if (va.size() != rows * cols) {
    throw ShapeError("reshape: cannot view " + va.shape_str() + " as (" + std::to_string(rows) +
                     "x" + std::to_string(cols) + ")");
  }
  Node n;
  n.op = Op::Reshape;
  n.a = a.id();
  // Row-major on both sides, so the linear order is preserved.
  n.value = Tensor::matrix(Eigen::Map<const Matrix>(va.data().data(), rows, cols));
  return push(std::move(n));
}

Var Tape::reshape(Var a, Index n_out) {
  const Tensor& va = val(a.id());
  if (va.size() != n_out) {
    throw ShapeError("reshape: cannot view " + va.shape_str() + " as (" + std::to_string(n_out) +
                     ")");
  }
  Node n;
  n.op = Op::Reshape;
  n.a = a.id();
  n.value = Tensor::vector(Eigen::Map<const Vector>(va.data().data(), n_out));
  return push(std::move(n));
}

GradientSet Tape::backward(Var loss) const {
  if (loss.tape() != this || loss.id() < 0 ||
      loss.id() >= static_cast<int>(nodes_.size())) {
    throw ValidationError("backward: loss does not belong to this tape");
  }
  const Tensor& root = val(loss.id());
  if (root.size() != 1) {
    throw ShapeError("backward: loss must be scalar, got " + root.shape_str());
  }

  std::vector<Matrix> adj(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    adj[i] = Matrix::Zero(nodes_[i].value.rows(), nodes_[i].value.cols());
  }
  adj[static_cast<std::size_t>(loss.id())](0, 0) = 1.0;

  for (int i = loss.id(); i >= 0; --i) {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    const Matrix& g = adj[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::Constant:
      case Op::Variable:
        break;
      case Op::Add:
        adj[n.a] += g;
        adj[n.b] += g;
        break;
      case Op::Sub:
        adj[n.a] += g;
        adj[n.b] -= g;
        break;
      case Op::Mul:
        adj[n.a] += g.cwiseProduct(val(n.b).data());
        adj[n.b] += g.cwiseProduct(val(n.a).data());
        break;
      case Op::ScalarMul:
        adj[n.a] += n.coeff * g;
        break;
      case Op::MatMul:
        adj[n.a] += g * val(n.b).data().transpose();
        adj[n.b] += val(n.a).data().transpose() * g;
        break;
      case Op::MatVec:
        adj[n.a] += g.col(0) * val(n.b).data().col(0).transpose();
        adj[n.b] += val(n.a).data().transpose() * g;
        break;
      case Op::Tanh:
        // d tanh = 1 - tanh^2, with tanh cached as this node's value.
        adj[n.a] +=
            g.cwiseProduct((1.0 - n.value.data().array().square()).matrix());
        break;
      case Op::Abs:
        // Subgradient at 0 fixed to 0.
        adj[n.a] += g.cwiseProduct(
            val(n.a).data().unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }));
        break;
      case Op::Square:
        adj[n.a] += 2.0 * g.cwiseProduct(val(n.a).data());
        break;
      case Op::Sum:
        adj[n.a].array() += g(0, 0);
        break;
      case Op::Mean:
        adj[n.a].array() += g(0, 0) / static_cast<double>(val(n.a).size());
        break;
      case Op::Reshape: {
        const Tensor& parent = val(n.a);
        adj[n.a] += Eigen::Map<const Matrix>(g.data(), parent.rows(), parent.cols());
        break;
      }
    }
  }

  GradientSet grads;
  for (const auto& [name, id] : variables_) {
    const Tensor& v = val(id);
    Matrix gm = adj[static_cast<std::size_t>(id)];
    grads[name] = (v.rank() == 1) ? Tensor::vector(gm.col(0)) : Tensor::matrix(std::move(gm));
  }
  return grads;
}

double evaluate(const ScalarFn& fn, const ParamSet& params) {
  Tape tape;
  std::map<std::string, Var> vars;
  for (const auto& [name, value] : params) vars[name] = tape.constant(value);
  Var out = fn(tape, vars);
  return out.value().scalar_value();
}

GradientSet gradient(const ScalarFn& fn, const ParamSet& params) {
  Tape tape;
  std::map<std::string, Var> vars;
  for (const auto& [name, value] : params) vars[name] = tape.variable(name, value);
  Var out = fn(tape, vars);
  return tape.backward(out);
}

double finite_diff_check(const ScalarFn& fn, const ParamSet& params, double step) {
  GradientSet autodiff = gradient(fn, params);
  double worst = 0.0;
  for (const auto& [name, value] : params) {
    const Matrix& ad = autodiff.at(name).data();
    for (Index r = 0; r < value.rows(); ++r) {
      for (Index c = 0; c < value.cols(); ++c) {
        ParamSet bumped = params;
        bumped[name].data()(r, c) = value.data()(r, c) + step;
        const double hi = evaluate(fn, bumped);
        bumped[name].data()(r, c) = value.data()(r, c) - step;
        const double lo = evaluate(fn, bumped);
        const double fd = (hi - lo) / (2.0 * step);
        const double err = std::abs(ad(r, c) - fd) / (std::abs(fd) + 1e-8);
        if (err > worst) worst = err;
      }
    }
  }
  return worst;
}

}  // namespace icode::ad
