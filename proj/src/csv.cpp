#include "gibbs_lines/csv.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace gibbs_lines {

std::string format_double(double v) {
    if (std::isnan(v)) throw std::domain_error("format_double: NaN");
    if (v == kInf) return "inf";
    if (v == kNegInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_cell(const std::optional<double>& v) {
    return v.has_value() ? format_double(*v) : "undefined";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ += ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\r\n") != std::string::npos) {
            out_ += '"';
            for (char c : f) {
                if (c == '"') out_ += '"';
                out_ += c;
            }
            out_ += '"';
        } else {
            out_ += f;
        }
    }
    out_ += "\r\n";
}

std::string environment_csv(const PolymerEnvironment& env) {
    CsvWriter w;
    w.row({"i", "j", "weight"});
    for (int i = 1; i <= env.n_max; ++i)
        for (int j = 1; j <= env.K; ++j)
            w.row({std::to_string(i), std::to_string(j), format_double(env.weight(i, j))});
    return w.str();
}

std::string environment_header_json(const PolymerEnvironment& env) {
    nlohmann::json j{{"gamma", env.gamma},
                     {"seed", env.seed},
                     {"n_max", env.n_max},
                     {"K", env.K}};
    return j.dump(2) + "\n";
}

std::string triangular_array_csv(const TriangularArray& arr) {
    CsvWriter w;
    w.row({"k", "l", "log_z"});
    for (int k = 1; k <= arr.K; ++k)
        for (int l = 1; l <= k; ++l)
            w.row({std::to_string(k), std::to_string(l), format_cell(arr.entry(k, l))});
    return w.str();
}

std::string scaled_ensemble_csv(const ScaledEnsemble& ens) {
    CsvWriter w;
    w.row({"i", "x", "value", "defined"});
    for (int i = 1; i <= ens.num_curves; ++i)
        for (int s = 0; s < ens.grid.count(); ++s) {
            const bool def = ens.is_defined(i, s);
            w.row({std::to_string(i), format_double(ens.grid.site(s)),
                   def ? format_double(ens.value(i, s)) : "undefined",
                   def ? "1" : "0"});
        }
    return w.str();
}

std::string scaled_ensemble_metadata_json(const ScaledEnsemble& ens) {
    nlohmann::json j{{"N", ens.N},
                     {"t", ens.t},
                     {"mesh", ens.grid.mesh()},
                     {"x_origin", ens.grid.origin()},
                     {"sites", ens.grid.count()},
                     {"curves", ens.num_curves},
                     {"center_slope", ens.center_slope},
                     {"center_const", ens.center_const}};
    return j.dump(2) + "\n";
}

} // namespace gibbs_lines
