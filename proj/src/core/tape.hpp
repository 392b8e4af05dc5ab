#pragma once

#include <vector>

#include "core/matrix.hpp"

namespace ee {

// Define-by-run reverse-mode tape over Matrix kernels. Node values are
// computed eagerly on recording; backward() fills one gradient per node in
// reverse recording order. The primitive set is closed: anything the losses
// or networks need is composed from the ops below.
class Tape {
public:
  using NodeId = int;

  NodeId input(Matrix v);  // leaf; gradient is still computed
  NodeId matmul(NodeId a, NodeId b);
  NodeId matmul_nt(NodeId a, NodeId b);
  NodeId transpose(NodeId a);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId add_rowvec(NodeId a, NodeId r);
  NodeId scale(NodeId a, double s);
  NodeId leaky_relu(NodeId a, double slope);
  NodeId row_normalize(NodeId a);
  NodeId exp_elem(NodeId a);
  NodeId log_elem(NodeId a);
  NodeId concat_cols(NodeId a, NodeId b);
  NodeId softmax_xent_diag(NodeId a);  // 1x1
  NodeId diag_mean(NodeId a);          // 1x1
  NodeId sum_all(NodeId a);            // 1x1
  NodeId mean_all(NodeId a);           // 1x1

  const Matrix& value(NodeId id) const { return nodes_[id].value; }
  double scalar_value(NodeId id) const;

  // Seeds d(output)=1 (output must be 1x1) and accumulates gradients for
  // every node. Deterministic: pure reverse sweep, no reordering.
  void backward(NodeId output);
  const Matrix& grad(NodeId id) const { return grads_[id]; }

  std::size_t node_count() const { return nodes_.size(); }

private:
  enum class Op {
    input, matmul, matmul_nt, transpose, add, sub, add_rowvec, scale,
    leaky_relu, row_normalize, exp_elem, log_elem, concat_cols,
    softmax_xent_diag, diag_mean, sum_all, mean_all,
  };

  struct Node {
    Op op;
    NodeId a = -1;
    NodeId b = -1;
    double c = 0.0;  // slope / scale factor
    Matrix value;
    Matrix saved;  // op-specific backward cache (softmax rows, row norms)
  };

  NodeId push(Node n);

  std::vector<Node> nodes_;
  std::vector<Matrix> grads_;
};

}  // namespace ee
