#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rootcross/parallel_solver.hpp"

namespace rootcross {

using json = nlohmann::json;

inline constexpr int kDocumentVersion = 1;

/// Raised for documents that do not match the expected schema.
class DocumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PolynomialDocument {
    std::vector<Complex> coeffs;  ///< ascending power
    std::string label;

    /// Throws rootcross::Error(InvalidInput) for empty or non-finite input.
    Polynomial polynomial() const { return Polynomial(coeffs); }
};

/// {"coeffs": [[re, im], ...], "label": "..."}; a bare coefficient array is
/// accepted as well.
PolynomialDocument parse_polynomial_document(const json& j);
json to_json(const PolynomialDocument& doc);

json complex_to_json(Complex z);
Complex complex_from_json(const json& j);

json to_json(const Crossing& c);
Crossing crossing_from_json(const json& j);

json to_json(const TrackEvent& e);
TrackEvent event_from_json(const json& j);

json to_json(const SolverReport& rep);
SolverReport report_from_json(const json& j);

json to_json(const SingleRoot& s);

/// Overrides present in j replace the matching fields of base.
TrackerOptions tracker_options_from_json(const json& j, TrackerOptions base = {});

/// {"r", "points", "crossings"} for one radius.
json curve_document(const Polynomial& p, double r, int samples);

/// One line-oriented record per state: r, theta, x, param, |f|.
json state_record(const Polynomial& p, const TrackState& s, std::size_t index);
json event_record(const TrackEvent& e);

/// Newline-delimited records for a trajectory, terminated by one event record.
/// When track_id >= 0 every record carries it.
void write_trajectory_records(std::ostream& out, const Polynomial& p, const Trajectory& t, int track_id = -1);

}  // namespace rootcross
