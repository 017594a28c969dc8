#ifndef GIBBS_LINES_CSV_HPP
#define GIBBS_LINES_CSV_HPP

#include <string>
#include <vector>

#include "gibbs_lines/polymer.hpp"
#include "gibbs_lines/scaling.hpp"

namespace gibbs_lines {

// 17-significant-digit decimal rendering; the undefined marker and +-inf get
// their literal tokens.
std::string format_double(double v);
std::string format_cell(const std::optional<double>& v);

// RFC-4180 rows: fields quoted only when they need it, CRLF line ends.
class CsvWriter {
public:
    void row(const std::vector<std::string>& fields);
    const std::string& str() const { return out_; }

private:
    std::string out_;
};

std::string environment_csv(const PolymerEnvironment& env);
std::string environment_header_json(const PolymerEnvironment& env);

std::string triangular_array_csv(const TriangularArray& arr);

std::string scaled_ensemble_csv(const ScaledEnsemble& ens);
std::string scaled_ensemble_metadata_json(const ScaledEnsemble& ens);

} // namespace gibbs_lines

#endif
