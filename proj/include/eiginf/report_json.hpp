#pragma once

// JSON renderings of decompositions, test reports and centrality results.
// Every top-level report carries "schema_version".

#include <string>
#include <vector>

#include "eiginf/centrality.hpp"
#include "eiginf/inference.hpp"
#include "eiginf/matrix_io.hpp"

namespace eiginf {

inline constexpr int kSchemaVersion = 1;

Json complex_vector_to_json(const CVec& v);  // {"real": [...], "imag": [...]}
Json complex_matrix_to_json(const CMat& m);  // {"real": matrix, "imag": matrix}

Json spectrum_to_json(const Spectrum& s);
// Spectrum plus the real split for `sel`, projectors and invariant checks.
Json decomposition_to_json(const Spectrum& s, const SpectralSplit& split,
                           const RootSelector& sel);
// R_I Lambda_I L_I' + R_J Lambda_J L_J' from a decomposition document.
Mat reconstruct_from_decomposition(const Json& doc);

Json report_to_json(const TestReport& r);
Json estimate_to_json(const NormalizedEstimate& e);
Json centrality_to_json(const CentralityResult& r, const std::vector<std::string>& labels);
Json membership_to_json(const MembershipResult& r);
Json intervals_to_json(const std::vector<ScoreInterval>& cis,
                       const std::vector<std::string>& labels, double alpha);

}  // namespace eiginf
