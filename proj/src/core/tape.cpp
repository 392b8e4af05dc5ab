#include "core/tape.hpp"

#include <cmath>
#include <utility>

#include "core/errors.hpp"

namespace ee {

Tape::NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Tape::NodeId Tape::input(Matrix v) {
  return push({Op::input, -1, -1, 0.0, std::move(v), {}});
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  return push({Op::matmul, a, b, 0.0, ee::matmul(value(a), value(b)), {}});
}

Tape::NodeId Tape::matmul_nt(NodeId a, NodeId b) {
  return push({Op::matmul_nt, a, b, 0.0, ee::matmul_nt(value(a), value(b)), {}});
}

Tape::NodeId Tape::transpose(NodeId a) {
  return push({Op::transpose, a, -1, 0.0, ee::transpose(value(a)), {}});
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  return push({Op::add, a, b, 0.0, ee::add(value(a), value(b)), {}});
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
  return push({Op::sub, a, b, 0.0, ee::sub(value(a), value(b)), {}});
}

Tape::NodeId Tape::add_rowvec(NodeId a, NodeId r) {
  return push({Op::add_rowvec, a, r, 0.0, ee::add_rowvec(value(a), value(r)), {}});
}

Tape::NodeId Tape::scale(NodeId a, double s) {
  return push({Op::scale, a, -1, s, ee::scale(value(a), s), {}});
}

Tape::NodeId Tape::leaky_relu(NodeId a, double slope) {
  return push({Op::leaky_relu, a, -1, slope, ee::leaky_relu(value(a), slope), {}});
}

Tape::NodeId Tape::row_normalize(NodeId a) {
  const Matrix& x = value(a);
  Matrix norms(x.rows, 1);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double s = 0.0;
    const double* xi = x.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) s += xi[j] * xi[j];
    norms(i, 0) = std::sqrt(s);
  }
  return push({Op::row_normalize, a, -1, 0.0, ee::row_normalize(x), std::move(norms)});
}

Tape::NodeId Tape::exp_elem(NodeId a) {
  return push({Op::exp_elem, a, -1, 0.0, ee::exp_elem(value(a)), {}});
}

Tape::NodeId Tape::log_elem(NodeId a) {
  return push({Op::log_elem, a, -1, 0.0, ee::log_elem(value(a)), {}});
}

Tape::NodeId Tape::concat_cols(NodeId a, NodeId b) {
  return push({Op::concat_cols, a, b, 0.0, ee::concat_cols(value(a), value(b)), {}});
}

Tape::NodeId Tape::softmax_xent_diag(NodeId a) {
  // Cache softmax rows for the backward pass.
  Matrix p = ee::softmax_rows(value(a));
  return push({Op::softmax_xent_diag, a, -1, 0.0,
               Matrix::scalar(ee::softmax_xent_diag(value(a))), std::move(p)});
}

Tape::NodeId Tape::diag_mean(NodeId a) {
  return push({Op::diag_mean, a, -1, 0.0, Matrix::scalar(ee::diag_mean(value(a))), {}});
}

Tape::NodeId Tape::sum_all(NodeId a) {
  return push({Op::sum_all, a, -1, 0.0, Matrix::scalar(ee::sum_all(value(a))), {}});
}

Tape::NodeId Tape::mean_all(NodeId a) {
  return push({Op::mean_all, a, -1, 0.0, Matrix::scalar(ee::mean_all(value(a))), {}});
}

double Tape::scalar_value(NodeId id) const {
  const Matrix& v = value(id);
  if (v.rows != 1 || v.cols != 1) throw DomainError("scalar_value on non-scalar node");
  return v.data[0];
}

void Tape::backward(NodeId output) {
  const Matrix& out = value(output);
  if (out.rows != 1 || out.cols != 1) throw DomainError("backward requires a 1x1 output node");

  grads_.assign(nodes_.size(), Matrix());
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    grads_[i] = Matrix(nodes_[i].value.rows, nodes_[i].value.cols);
  grads_[output].data[0] = 1.0;

  for (NodeId id = static_cast<NodeId>(nodes_.size()) - 1; id >= 0; --id) {
    const Node& n = nodes_[id];
    const Matrix& g = grads_[id];
    switch (n.op) {
      case Op::input:
        break;
      case Op::matmul: {
        Matrix da = ee::matmul_nt(g, nodes_[n.b].value);
        Matrix db = ee::matmul_tn(nodes_[n.a].value, g);
        grads_[n.a] = ee::add(grads_[n.a], da);
        grads_[n.b] = ee::add(grads_[n.b], db);
        break;
      }
      case Op::matmul_nt: {
        Matrix da = ee::matmul(g, nodes_[n.b].value);
        Matrix db = ee::matmul_tn(g, nodes_[n.a].value);
        grads_[n.a] = ee::add(grads_[n.a], da);
        grads_[n.b] = ee::add(grads_[n.b], db);
        break;
      }
      case Op::transpose:
        grads_[n.a] = ee::add(grads_[n.a], ee::transpose(g));
        break;
      case Op::add:
        grads_[n.a] = ee::add(grads_[n.a], g);
        grads_[n.b] = ee::add(grads_[n.b], g);
        break;
      case Op::sub:
        grads_[n.a] = ee::add(grads_[n.a], g);
        grads_[n.b] = ee::sub(grads_[n.b], g);
        break;
      case Op::add_rowvec:
        grads_[n.a] = ee::add(grads_[n.a], g);
        grads_[n.b] = ee::add(grads_[n.b], ee::col_sums(g));
        break;
      case Op::scale:
        grads_[n.a] = ee::add(grads_[n.a], ee::scale(g, n.c));
        break;
      case Op::leaky_relu: {
        const Matrix& x = nodes_[n.a].value;
        Matrix da = g;
        for (std::size_t i = 0; i < x.size(); ++i)
          if (x.data[i] < 0.0) da.data[i] *= n.c;
        grads_[n.a] = ee::add(grads_[n.a], da);
        break;
      }
      case Op::row_normalize: {
        // y = x / |x|; dx = (g - (g . y) y) / |x| per row.
        const Matrix& y = n.value;
        const Matrix& norms = n.saved;
        Matrix da(y.rows, y.cols);
        for (std::size_t i = 0; i < y.rows; ++i) {
          const double* gi = g.row(i);
          const double* yi = y.row(i);
          double dot = 0.0;
          for (std::size_t j = 0; j < y.cols; ++j) dot += gi[j] * yi[j];
          double* di = da.row(i);
          const double inv = 1.0 / norms(i, 0);
          for (std::size_t j = 0; j < y.cols; ++j) di[j] = (gi[j] - dot * yi[j]) * inv;
        }
        grads_[n.a] = ee::add(grads_[n.a], da);
        break;
      }
      case Op::exp_elem:
        grads_[n.a] = ee::add(grads_[n.a], ee::hadamard(g, n.value));
        break;
      case Op::log_elem: {
        const Matrix& x = nodes_[n.a].value;
        Matrix da = g;
        for (std::size_t i = 0; i < x.size(); ++i) da.data[i] /= x.data[i];
        grads_[n.a] = ee::add(grads_[n.a], da);
        break;
      }
      case Op::concat_cols: {
        const Matrix& a = nodes_[n.a].value;
        const Matrix& b = nodes_[n.b].value;
        Matrix da(a.rows, a.cols), db(b.rows, b.cols);
        for (std::size_t i = 0; i < a.rows; ++i) {
          const double* gi = g.row(i);
          for (std::size_t j = 0; j < a.cols; ++j) da(i, j) = gi[j];
          for (std::size_t j = 0; j < b.cols; ++j) db(i, j) = gi[a.cols + j];
        }
        grads_[n.a] = ee::add(grads_[n.a], da);
        grads_[n.b] = ee::add(grads_[n.b], db);
        break;
      }
      case Op::softmax_xent_diag: {
        const Matrix& p = n.saved;
        const double go = g.data[0] / static_cast<double>(p.rows);
        Matrix da = ee::scale(p, go);
        for (std::size_t i = 0; i < p.rows; ++i) da(i, i) -= go;
        grads_[n.a] = ee::add(grads_[n.a], da);
        break;
      }
      case Op::diag_mean: {
        const Matrix& x = nodes_[n.a].value;
        Matrix da(x.rows, x.cols);
        const double go = g.data[0] / static_cast<double>(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i) da(i, i) = go;
        grads_[n.a] = ee::add(grads_[n.a], da);
        break;
      }
      case Op::sum_all: {
        const Matrix& x = nodes_[n.a].value;
        Matrix da(x.rows, x.cols);
        for (double& v : da.data) v = g.data[0];
        grads_[n.a] = ee::add(grads_[n.a], da);
        break;
      }
      case Op::mean_all: {
        const Matrix& x = nodes_[n.a].value;
        Matrix da(x.rows, x.cols);
        const double go = g.data[0] / static_cast<double>(x.size());
        for (double& v : da.data) v = go;
        grads_[n.a] = ee::add(grads_[n.a], da);
        break;
      }
    }
  }
}

}  // namespace ee
