#include "core/losses.hpp"

#include <cstring>

#include "core/errors.hpp"

namespace ee {

MemoryBank::MemoryBank(std::size_t capacity, int dim) : capacity_(capacity), dim_(dim) {
  if (dim <= 0) throw DomainError("memory bank dim must be positive");
}

void MemoryBank::push(const Matrix& rows) {
  if (rows.cols != dim_) throw DomainError("memory bank row width mismatch");
  if (capacity_ == 0) return;
  for (int i = 0; i < rows.rows; ++i) {
    std::vector<double> row(rows.data.begin() + static_cast<std::ptrdiff_t>(i) * rows.cols,
                            rows.data.begin() + static_cast<std::ptrdiff_t>(i + 1) * rows.cols);
    rows_.push_back(std::move(row));
    if (rows_.size() > capacity_) rows_.pop_front();
  }
}

Matrix MemoryBank::snapshot() const {
  Matrix out(static_cast<int>(rows_.size()), dim_);
  for (std::size_t i = 0; i < rows_.size(); ++i)
    std::memcpy(out.data.data() + i * static_cast<std::size_t>(dim_), rows_[i].data(),
                sizeof(double) * static_cast<std::size_t>(dim_));
  return out;
}

namespace {

void check_pair(const Tape& tape, Tape::NodeId f, Tape::NodeId g, double tau) {
  const Matrix& fv = tape.value(f);
  const Matrix& gv = tape.value(g);
  if (!(tau > 0.0)) throw DomainError("loss temperature must be positive");
  if (fv.rows == 0) throw DomainError("loss batch must be nonempty");
  if (fv.rows != gv.rows || fv.cols != gv.cols)
    throw DomainError("loss batches must share shape");
}

}  // namespace

Tape::NodeId loss_phi_y_node(Tape& tape, Tape::NodeId f, Tape::NodeId g, double tau,
                             const Matrix* bank) {
  check_pair(tape, f, g, tau);
  Tape::NodeId logits = tape.scale(tape.matmul_nt(f, g), 1.0 / tau);
  if (bank != nullptr && bank->rows > 0) {
    if (bank->cols != tape.value(g).cols) throw DomainError("bank embedding width mismatch");
    Tape::NodeId extra = tape.scale(tape.matmul_nt(f, tape.input(*bank)), 1.0 / tau);
    logits = tape.concat_cols(logits, extra);
  }
  return tape.softmax_xent_diag(logits);
}

Tape::NodeId loss_y_phi_node(Tape& tape, Tape::NodeId f, Tape::NodeId g, double tau) {
  check_pair(tape, f, g, tau);
  return tape.softmax_xent_diag(tape.scale(tape.matmul_nt(g, f), 1.0 / tau));
}

Tape::NodeId loss_sym_node(Tape& tape, Tape::NodeId f, Tape::NodeId g, double tau,
                           const Matrix* bank) {
  return tape.add(loss_phi_y_node(tape, f, g, tau, bank), loss_y_phi_node(tape, f, g, tau));
}

Tape::NodeId loss_intra_node(Tape& tape, Tape::NodeId f_anchor, Tape::NodeId f_aug, double tau) {
  check_pair(tape, f_anchor, f_aug, tau);
  // mean_i [log sum_j e^{D_ij} - N_ii] with D = F F^T / tau (symmetric) and
  // N = F~ F^T / tau, written via the diagonal cross-entropy kernel:
  //   xent(D) + diag_mean(D) - diag_mean(N).
  Tape::NodeId d = tape.scale(tape.matmul_nt(f_anchor, f_anchor), 1.0 / tau);
  Tape::NodeId n = tape.scale(tape.matmul_nt(f_aug, f_anchor), 1.0 / tau);
  return tape.sub(tape.add(tape.softmax_xent_diag(d), tape.diag_mean(d)), tape.diag_mean(n));
}

Tape::NodeId loss_objective_node(Tape& tape, LossMode mode, Tape::NodeId f, Tape::NodeId g,
                                 double tau, const Matrix* bank, Tape::NodeId f_aug,
                                 double intra_weight) {
  if (intra_weight < 0.0) throw DomainError("intra weight must be nonnegative");
  Tape::NodeId base;
  switch (mode) {
    case LossMode::sym: base = loss_sym_node(tape, f, g, tau, bank); break;
    case LossMode::phi_y: base = loss_phi_y_node(tape, f, g, tau, bank); break;
    case LossMode::y_phi: base = loss_y_phi_node(tape, f, g, tau); break;
    default: throw DomainError("unknown loss mode");
  }
  if (intra_weight == 0.0) return base;
  if (f_aug < 0) throw DomainError("intra loss requires augmented embeddings");
  return tape.add(base, tape.scale(loss_intra_node(tape, f, f_aug, tau), intra_weight));
}

double loss_phi_y(const Matrix& f, const Matrix& g, double tau, const Matrix* bank) {
  Tape t;
  return t.scalar_value(loss_phi_y_node(t, t.input(f), t.input(g), tau, bank));
}

double loss_y_phi(const Matrix& f, const Matrix& g, double tau) {
  Tape t;
  return t.scalar_value(loss_y_phi_node(t, t.input(f), t.input(g), tau));
}

double loss_sym(const Matrix& f, const Matrix& g, double tau, const Matrix* bank) {
  Tape t;
  return t.scalar_value(loss_sym_node(t, t.input(f), t.input(g), tau, bank));
}

double loss_intra(const Matrix& f_anchor, const Matrix& f_aug, double tau) {
  Tape t;
  return t.scalar_value(loss_intra_node(t, t.input(f_anchor), t.input(f_aug), tau));
}

}  // namespace ee
