#include "noneq/markov/io.hpp"

#include <iomanip>

namespace noneq::markov {

void write_spectrum_csv(std::ostream& out, const SpectralExpansion& ex) {
  const auto s = ex.right.rows();
  out << "index,value";
  for (Eigen::Index a = 0; a < s; ++a) out << ",u_" << a;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index m = 0; m < ex.eigenvalues.size(); ++m) {
    out << m << ',' << ex.eigenvalues[m];
    for (Eigen::Index a = 0; a < s; ++a) out << ',' << ex.right(a, m);
    out << '\n';
  }
}

void write_operator_csv(std::ostream& out, const TransitionOperator& op) {
  out << "to_state,from_state,value\n" << std::setprecision(17);
  for (Eigen::Index a = 0; a < op.matrix.cols(); ++a)
    for (Eigen::Index b = 0; b < op.matrix.rows(); ++b)
      if (op.matrix(b, a) != 0.0) out << b << ',' << a << ',' << op.matrix(b, a) << '\n';
}

}  // namespace noneq::markov
