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
#include "sirctl/csv.hpp"

#include "sirctl/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sirctl {

namespace fs = std::filesystem;

namespace {

std::string optional_number(const std::optional<double>& v)
{
    return v ? format_number(*v) : std::string();
}

std::string time_or_inf(const std::optional<double>& v)
{
    return format_number(v.value_or(std::numeric_limits<double>::infinity()));
}

std::optional<double> optional_from(const std::string& field)
{
    if (field.empty()) {
        return std::nullopt;
    }
    return parse_number(field);
}

std::optional<double> time_from(const std::string& field)
{
    const double v = parse_number(field);
    if (std::isinf(v)) {
        return std::nullopt;
    }
    return v;
}

bool flag_from(const std::string& field)
{
    if (field == "1") {
        return true;
    }
    if (field == "0") {
        return false;
    }
    throw InvalidArgument("expected 0 or 1, got '" + field + "'");
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

/// Reads data rows after checking the header; each row must have the header's column count.
template <typename F>
void for_each_row(std::istream& in, const char* header, F&& handle)
{
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw InvalidArgument(std::string("CSV header mismatch, expected '") + header + "'");
    }
    const std::size_t columns = split(header).size();
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != columns) {
            throw InvalidArgument("CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(columns));
        }
        handle(fields);
    }
}

} // namespace

std::string format_number(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    std::ostringstream out;
    out.precision(12);
    out << value;
    return out.str();
}

double parse_number(const std::string& field)
{
    if (field == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (field == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (field == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("not a number: '" + field + "'");
    }
    if (used != field.size()) {
        throw InvalidArgument("trailing characters in number: '" + field + "'");
    }
    return v;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<MeasuredSample>& measured)
{
    if (!measured.empty() && measured.size() != traj.size()) {
        throw InvalidArgument("measured series does not match the trajectory length");
    }
    out << kTrajectoryHeader << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const SirState& x = traj.state(k);
        const double s_meas = measured.empty() ? x.s : measured[k].s_hat;
        const double i_meas = measured.empty() ? x.i : measured[k].i_hat;
        out << format_number(x.t) << ',' << format_number(x.s) << ',' << format_number(x.i) << ','
            << format_number(x.r) << ',' << format_number(s_meas) << ',' << format_number(i_meas) << ','
            << format_number(traj.u(k)) << ",1\n";
    }
}

void write_trajectory_csv(std::ostream& out, const ClosedLoopRun& run)
{
    out << kTrajectoryHeader << '\n';
    const Trajectory& traj = run.trajectory;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const SirState& x = traj.state(k);
        out << format_number(x.t) << ',' << format_number(x.s) << ',' << format_number(x.i) << ','
            << format_number(x.r) << ',' << format_number(run.measured[k].s_hat) << ','
            << format_number(run.measured[k].i_hat) << ',' << format_number(traj.u(k)) << ','
            << static_cast<int>(run.stages[k]) << '\n';
    }
}

void write_estimates_csv(std::ostream& out, const std::vector<EstimateRow>& rows)
{
    out << kEstimatesHeader << '\n';
    for (const auto& r : rows) {
        out << r.alpha << ',' << format_number(r.h) << ',' << format_number(r.beta_hat) << ','
            << format_number(r.gamma_hat) << ',' << format_number(r.err_norm) << ',' << format_number(r.bound_b)
            << ',' << (r.contained ? 1 : 0) << '\n';
    }
}

void write_costs_csv(std::ostream& out, const std::vector<CostReport>& rows)
{
    out << kCostsHeader << '\n';
    for (const auto& r : rows) {
        out << to_string(r.policy) << ',' << format_number(r.total_cost) << ',' << optional_number(r.gap_direct)
            << ',' << optional_number(r.gap_lemma4) << ',' << optional_number(r.gap_thm4) << ','
            << optional_number(r.gap_upper) << ',' << time_or_inf(r.times.t_b) << ',' << time_or_inf(r.times.t_h)
            << ',' << (r.feasible ? 1 : 0) << '\n';
    }
}

void write_policy_trace_csv(std::ostream& out, const PolicyTrace& trace)
{
    out << kPolicyTraceHeader << '\n';
    for (const auto& k : trace.knots) {
        out << format_number(k.t) << ',' << format_number(k.u) << ',' << static_cast<int>(k.stage) << ','
            << format_number(k.s_obs) << ',' << format_number(k.i_obs) << '\n';
    }
}

void write_gaps_csv(std::ostream& out, const std::vector<GapRow>& rows, const EpidemicParams& truth)
{
    out << kGapsHeader << '\n';
    for (const auto& r : rows) {
        const CostReport& c = r.robust;
        out << format_number(r.epsilon) << ',' << format_number(truth.beta * (1.0 + r.epsilon)) << ','
            << format_number(truth.gamma * (1.0 - r.epsilon)) << ',' << format_number(r.optimal_cost) << ','
            << format_number(c.total_cost) << ',' << optional_number(c.gap_direct) << ','
            << optional_number(c.gap_lemma4) << ',' << optional_number(c.gap_thm4) << ','
            << optional_number(c.gap_upper) << ',' << time_or_inf(c.times.t_b) << ','
            << time_or_inf(c.times.t_h) << ',' << (c.feasible ? 1 : 0) << '\n';
    }
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in)
{
    std::vector<TrajectoryRow> rows;
    for_each_row(in, kTrajectoryHeader, [&](const std::vector<std::string>& f) {
        TrajectoryRow r;
        r.t = parse_number(f[0]);
        r.s_true = parse_number(f[1]);
        r.i_true = parse_number(f[2]);
        r.r_true = parse_number(f[3]);
        r.s_meas = parse_number(f[4]);
        r.i_meas = parse_number(f[5]);
        r.u = parse_number(f[6]);
        r.stage = static_cast<int>(parse_number(f[7]));
        rows.push_back(r);
    });
    return rows;
}

std::vector<EstimateRow> read_estimates_csv(std::istream& in)
{
    std::vector<EstimateRow> rows;
    for_each_row(in, kEstimatesHeader, [&](const std::vector<std::string>& f) {
        EstimateRow r;
        r.alpha = static_cast<int>(parse_number(f[0]));
        r.h = parse_number(f[1]);
        r.beta_hat = parse_number(f[2]);
        r.gamma_hat = parse_number(f[3]);
        r.err_norm = parse_number(f[4]);
        r.bound_b = parse_number(f[5]);
        r.contained = flag_from(f[6]);
        r.singular = std::isnan(r.beta_hat);
        rows.push_back(r);
    });
    return rows;
}

std::vector<CostReport> read_costs_csv(std::istream& in)
{
    std::vector<CostReport> rows;
    for_each_row(in, kCostsHeader, [&](const std::vector<std::string>& f) {
        CostReport r;
        r.policy = policy_kind_from_string(f[0]);
        r.total_cost = parse_number(f[1]);
        r.gap_direct = optional_from(f[2]);
        r.gap_lemma4 = optional_from(f[3]);
        r.gap_thm4 = optional_from(f[4]);
        r.gap_upper = optional_from(f[5]);
        r.times.t_b = time_from(f[6]);
        r.times.t_h = time_from(f[7]);
        r.feasible = flag_from(f[8]);
        rows.push_back(r);
    });
    return rows;
}

void write_text_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out << content;
    out.close();
    if (!out) {
        throw Error("failed writing '" + path.string() + "'");
    }
}

std::vector<fs::path> emit_csv(const RunArtifacts& artifacts, const fs::path& out_dir)
{
    std::vector<fs::path> written;
    auto make_dir = [](const fs::path& dir) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw Error("cannot create directory '" + dir.string() + "': " + ec.message());
        }
    };
    auto emit = [&](const fs::path& path, const std::ostringstream& body) {
        write_text_file(path, body.str());
        written.push_back(path);
    };

    make_dir(out_dir);
    for (const auto& run : artifacts.runs) {
        const fs::path dir = out_dir / to_string(run.trace.kind);
        make_dir(dir);
        std::ostringstream traj;
        write_trajectory_csv(traj, run);
        emit(dir / "trajectory.csv", traj);
        std::ostringstream trace;
        write_policy_trace_csv(trace, run.trace);
        emit(dir / "policy_trace.csv", trace);
    }
    if (artifacts.open_loop) {
        const fs::path dir = out_dir / "open_loop";
        make_dir(dir);
        std::ostringstream traj;
        write_trajectory_csv(traj, *artifacts.open_loop, {});
        emit(dir / "trajectory.csv", traj);
    }
    std::ostringstream costs;
    write_costs_csv(costs, artifacts.costs);
    emit(out_dir / "costs.csv", costs);
    std::ostringstream estimates;
    write_estimates_csv(estimates, artifacts.estimates);
    emit(out_dir / "estimates.csv", estimates);
    return written;
}

} // namespace sirctl
