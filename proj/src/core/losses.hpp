#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "core/matrix.hpp"
#include "core/network.hpp"
#include "core/tape.hpp"

namespace ee {

// FIFO queue of detached parameter embeddings. A snapshot is appended to the
// negative set of the parameter-side loss denominator; the stored rows never
// carry gradient (they enter the tape as constant leaves).
class MemoryBank {
public:
  MemoryBank(std::size_t capacity, int dim);
  void push(const Matrix& rows);  // rows: batch x dim, oldest evicted beyond capacity
  Matrix snapshot() const;        // size() x dim, oldest first
  std::size_t size() const { return rows_.size(); }
  std::size_t capacity() const { return capacity_; }

private:
  std::size_t capacity_;
  int dim_;
  std::deque<std::vector<double>> rows_;
};

// Tape builders. f and g are nodes holding batch x dim embeddings with
// matched row counts; bank (nullable, may be empty) adds extra negative
// columns to the parameter-side denominator. Values are exact batch means.
Tape::NodeId loss_phi_y_node(Tape& tape, Tape::NodeId f, Tape::NodeId g, double tau,
                             const Matrix* bank = nullptr);
Tape::NodeId loss_y_phi_node(Tape& tape, Tape::NodeId f, Tape::NodeId g, double tau);
Tape::NodeId loss_sym_node(Tape& tape, Tape::NodeId f, Tape::NodeId g, double tau,
                           const Matrix* bank = nullptr);
// Anchor-vs-augmented view loss; the denominator runs over anchor-anchor
// similarities including the self term.
Tape::NodeId loss_intra_node(Tape& tape, Tape::NodeId f_anchor, Tape::NodeId f_aug, double tau);

// Mode dispatch plus optional intra term: total = base + intra_weight * intra.
// f_aug must be a valid node when intra_weight > 0 (pass -1 otherwise).
Tape::NodeId loss_objective_node(Tape& tape, LossMode mode, Tape::NodeId f, Tape::NodeId g,
                                 double tau, const Matrix* bank, Tape::NodeId f_aug,
                                 double intra_weight);

// Value-only wrappers over a scratch tape; bitwise identical to the builders.
double loss_phi_y(const Matrix& f, const Matrix& g, double tau, const Matrix* bank = nullptr);
double loss_y_phi(const Matrix& f, const Matrix& g, double tau);
double loss_sym(const Matrix& f, const Matrix& g, double tau, const Matrix* bank = nullptr);
double loss_intra(const Matrix& f_anchor, const Matrix& f_aug, double tau);

}  // namespace ee
