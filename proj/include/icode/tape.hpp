#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "icode/types.hpp"

namespace icode::ad {

/// Dense rank-1 or rank-2 array of doubles. Rank-1 tensors are stored as
/// n-by-1 matrices; the rank is kept separately so shape checks distinguish a
/// length-n vector from an n-by-1 matrix. A scalar is a rank-1 tensor of
/// length 1.
class Tensor {
 public:
  Tensor() = default;

  static Tensor scalar(double v);
  static Tensor vector(Vector v);
  static Tensor matrix(Matrix m);
  static Tensor zeros(Index rows, Index cols);
  static Tensor zeros_like(const Tensor& t);

  int rank() const { return rank_; }
  Index rows() const { return data_.rows(); }
  Index cols() const { return data_.cols(); }
  Index size() const { return data_.size(); }
  bool is_scalar() const { return data_.size() == 1; }
  bool same_shape(const Tensor& o) const {
    return rank_ == o.rank_ && rows() == o.rows() && cols() == o.cols();
  }
  std::string shape_str() const;

  const Matrix& data() const { return data_; }
  Matrix& data() { return data_; }
  double scalar_value() const;
  Vector as_vector() const;  // requires rank 1
  bool all_finite() const { return data_.allFinite(); }

 private:
  Tensor(Matrix m, int rank) : data_(std::move(m)), rank_(rank) {}

  Matrix data_;
  int rank_ = 2;
};

enum class Op : std::uint8_t {
  Constant,
  Variable,
  Add,
  Sub,
  Mul,        // elementwise
  ScalarMul,  // fixed coefficient times tensor
  MatMul,
  MatVec,
  Tanh,
  Abs,
  Square,
  Sum,
  Mean,
  Reshape,
};

/// Gradients keyed by trainable-variable name, same shape as the variable.
using GradientSet = std::map<std::string, Tensor>;

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid as long as the tape lives.
class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  Tape* tape() const { return tape_; }
  int id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* t, int id) : tape_(t), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Recorded operation graph. Nodes are appended in execution order, so every
/// parent index precedes its consumer and a single reverse sweep suffices for
/// backpropagation. Single-threaded by design; independent tapes may run in
/// parallel.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Registers a trainable variable. Names must be unique per tape.
  Var variable(const std::string& name, Tensor value);
  /// Records a non-trainable leaf.
  Var constant(Tensor value);

  const Tensor& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  std::size_t num_nodes() const { return nodes_.size(); }
  const std::map<std::string, int>& variables() const { return variables_; }

  /// Reverse-mode sweep from a scalar loss. Every registered variable gets an
  /// entry; variables the loss does not depend on get zero gradients.
  GradientSet backward(Var loss) const;

  // Op constructors. All validate shapes and record one node.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scalar_mul(double c, Var a);
  Var matmul(Var a, Var b);
  Var matvec(Var a, Var x);
  Var tanh(Var a);
  Var abs(Var a);
  Var square(Var a);
  Var sum(Var a);
  Var mean(Var a);
  Var reshape(Var a, Index rows, Index cols);  // to rank-2
  Var reshape(Var a, Index n);                 // to rank-1

 private:
  struct Node {
    Op op = Op::Constant;
    int a = -1;
    int b = -1;
    double coeff = 0.0;  // ScalarMul only
    Tensor value;
  };

  Var push(Node n);
  const Tensor& val(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }

  std::vector<Node> nodes_;
  std::map<std::string, int> variables_;
};

inline const Tensor& Var::value() const { return tape_->value(id_); }

// Convenience sugar used by the model graphs.
inline Var operator+(Var a, Var b) { return a.tape()->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape()->sub(a, b); }
inline Var operator*(double c, Var a) { return a.tape()->scalar_mul(c, a); }

/// Named parameter set for gradient checking and the training loop.
using ParamSet = std::map<std::string, Tensor>;

/// Builds a scalar expression over the given tape from named leaf variables.
using ScalarFn = std::function<Var(Tape&, const std::map<std::string, Var>&)>;

/// Forward value of fn at params (no gradients).
double evaluate(const ScalarFn& fn, const ParamSet& params);

/// Autodiff gradient of fn at params.
GradientSet gradient(const ScalarFn& fn, const ParamSet& params);

/// Max over all parameter entries of
///   |autodiff - central_difference| / (|central_difference| + 1e-8).
double finite_diff_check(const ScalarFn& fn, const ParamSet& params, double step);

}  // namespace icode::ad
