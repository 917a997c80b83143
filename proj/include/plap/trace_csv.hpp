#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/fixedpoint.hpp"

namespace plap {

inline constexpr const char* kTraceHeader =
    "k,dphi_rel,J,res_S,res_T,norm_u_r1,norm_u_w1p,norm_phi_w1p,int_phi_ur,"
    "int_ur1_phitheta,energy_id_res";

/// Writes the per-iteration trace with full double precision, so a parse-back
/// reproduces the in-memory rows exactly.
inline void write_trace_csv(std::ostream& os, const SolveTrace& trace) {
    os << kTraceHeader << '\n';
    os.precision(17);
    for (const TraceRow& r : trace.rows) {
        os << r.k << ',' << r.dphi_rel << ',' << r.J << ',' << r.res_S << ',' << r.res_T << ','
           << r.norm_u_r1 << ',' << r.norm_u_w1p << ',' << r.norm_phi_w1p << ',' << r.int_phi_ur
           << ',' << r.int_ur1_phitheta << ',' << r.energy_id_res << '\n';
    }
}

inline SolveTrace parse_trace_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kTraceHeader)
        throw std::runtime_error("trace CSV: bad or missing header");
    SolveTrace trace;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        TraceRow r{};
        char c = 0;
        if (!(ss >> r.k >> c >> r.dphi_rel >> c >> r.J >> c >> r.res_S >> c >> r.res_T >> c >>
              r.norm_u_r1 >> c >> r.norm_u_w1p >> c >> r.norm_phi_w1p >> c >> r.int_phi_ur >> c >>
              r.int_ur1_phitheta >> c >> r.energy_id_res))
            throw std::runtime_error("trace CSV: malformed row '" + line + "'");
        trace.rows.push_back(r);
    }
    return trace;
}

}  // namespace plap
