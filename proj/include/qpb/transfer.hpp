#pragma once

#include <Eigen/Dense>

#include "qpb/fqm.hpp"
#include "qpb/lattice.hpp"
#include "qpb/qexp.hpp"

namespace qpb {

/// f over A = I^perp / I to A': component mu is f_{p(mu)} on I^perp and 0 elsewhere.
VVForm pull_up(const VVForm& f, const QuotientMap& qm);
/// g over A' to A: component lambda is the sum of g_mu over the fiber p^{-1}(lambda).
VVForm push_down(const VVForm& g, const QuotientMap& qm);

/// Matrices of the two maps on group algebras (columns are images of basis vectors).
Eigen::MatrixXd pull_up_matrix(const QuotientMap& qm);
Eigen::MatrixXd push_down_matrix(const QuotientMap& qm);

/// <f, Theta_K> for f over A_M (+) A_K(-1) (A_K(-1) in the coordinates of A_K):
/// g_mu = sum_lambda f_(mu, lambda) theta_{K + lambda}.
VVForm theta_contract(const VVForm& f, const FqModule& a_m, const VVForm& theta_k);

/// <f up, Theta_K> computed through A_K = G_K (+) G_K^perp without forming f up.
/// Throws InputError if G_K is degenerate in A_K.
VVForm contract_projection_path(const VVForm& f, const EmbeddingData& emb, const VVForm& theta_k);

/// Class in A_L of (alpha, nu) in A_M (+) A_K(-1), through lattice representatives;
/// throws InputError if (alpha, nu) is not in I^perp.
std::int64_t class_in_L(const EmbeddingData& emb, std::int64_t alpha, std::int64_t nu);

}  // namespace qpb
