/*
 * Copyright (C) 2026 The sirctl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef SIRCTL_CSV_HPP
#define SIRCTL_CSV_HPP

#include "sirctl/analysis.hpp"
#include "sirctl/control.hpp"
#include "sirctl/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sirctl {

inline constexpr const char* kTrajectoryHeader = "t,S_true,I_true,R_true,S_meas,I_meas,u_applied,stage";
inline constexpr const char* kEstimatesHeader = "alpha,h,beta_hat,gamma_hat,err_norm,bound_b,contained";
inline constexpr const char* kCostsHeader =
    "policy,total_cost,gap_direct,gap_lemma4,gap_thm4,gap_upper,t_b,t_h,feasible";
inline constexpr const char* kPolicyTraceHeader = "t,u,stage,s_obs,i_obs";
inline constexpr const char* kGapsHeader =
    "epsilon,beta_max,gamma_min,optimal_cost,robust_cost,gap_direct,gap_lemma4,gap_thm4,gap_upper,t_b,t_h,feasible";

/// 12 significant digits; "nan" / "inf" for non-finite values.
std::string format_number(double value);
double parse_number(const std::string& field);

struct TrajectoryRow {
    double t = 0.0;
    double s_true = 0.0;
    double i_true = 0.0;
    double r_true = 0.0;
    double s_meas = 0.0;
    double i_meas = 0.0;
    double u = 0.0;
    int stage = 1;
};

void write_trajectory_csv(std::ostream& out, const ClosedLoopRun& run);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<MeasuredSample>& measured);
void write_estimates_csv(std::ostream& out, const std::vector<EstimateRow>& rows);
void write_costs_csv(std::ostream& out, const std::vector<CostReport>& rows);
void write_policy_trace_csv(std::ostream& out, const PolicyTrace& trace);
void write_gaps_csv(std::ostream& out, const std::vector<GapRow>& rows, const EpidemicParams& truth);

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in);
std::vector<EstimateRow> read_estimates_csv(std::istream& in);
std::vector<CostReport> read_costs_csv(std::istream& in);

/// Writes every artifact below `out_dir` (created if needed) and returns the file list.
/// Per-policy files go to <out_dir>/<policy>/; filesystem errors name the offending path.
std::vector<std::filesystem::path> emit_csv(const RunArtifacts& artifacts, const std::filesystem::path& out_dir);

/// Writes one text file, replacing any previous content.
void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace sirctl

#endif // SIRCTL_CSV_HPP
