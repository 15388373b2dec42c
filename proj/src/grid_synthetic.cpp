#include "cbamgrid/grid/synthetic.hpp"

#include <cmath>
#include <sstream>

#include "cbamgrid/csv.hpp"
#include "cbamgrid/errors.hpp"
#include "cbamgrid/grid/timeutil.hpp"
#include "cbamgrid/rng.hpp"

namespace cbamgrid::grid {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kCoalEmissionFactor = 950.0;  // kg CO2/MWh, pins ci -> mix mapping

double diurnal(int hour_of_day, double peak_hour) {
    return std::sin(kTwoPi * (static_cast<double>(hour_of_day) - peak_hour) / 24.0);
}

}  // namespace

void SyntheticSpec::validate() const {
    require(!nodes.empty(), ErrorKind::Config, "synthetic spec declares no nodes");
    auto check_finite = [](double v, const char* name) {
        if (!std::isfinite(v)) raise(ErrorKind::Config, std::string("non-finite coefficient '") + name + "'");
    };
    check_finite(demand_price_slope, "demand_price_slope");
    check_finite(ci_price_coupling, "ci_price_coupling");
    check_finite(spillover_weight, "spillover_weight");
    check_finite(price_noise_std, "price_noise_std");
    check_finite(demand_noise_std, "demand_noise_std");
    check_finite(ci_noise_std, "ci_noise_std");
    check_finite(demand_amp, "demand_amp");
    check_finite(ci_amp, "ci_amp");
    check_finite(demand_quad, "demand_quad");
    check_finite(threshold, "threshold");
    check_finite(ets_price, "ets_price");
    check_finite(own_cost_weight, "own_cost_weight");
    require(own_cost_weight >= 0.0 && own_cost_weight <= 1.0, ErrorKind::Config,
            "own_cost_weight must lie in [0, 1]");
    for (int c = 0; c < 3; ++c) {
        check_finite(price_response[c], "price_response");
        check_finite(ci_response[c], "ci_response");
    }
    require(price_noise_std >= 0.0 && demand_noise_std >= 0.0 && ci_noise_std >= 0.0,
            ErrorKind::Config, "noise standard deviations must be non-negative");
    require(threshold >= 0.0 && ets_price >= 0.0, ErrorKind::Config,
            "threshold and ETS price must be non-negative");
    for (const auto& n : nodes) {
        check_finite(n.base_ci, "base_ci");
        check_finite(n.base_demand, "base_demand");
        check_finite(n.base_price, "base_price");
        require(n.base_ci >= 0.0, ErrorKind::Config, "base_ci must be non-negative for '" + n.code + "'");
        require(n.base_demand > 0.0, ErrorKind::Config, "base_demand must be positive for '" + n.code + "'");
    }
    for (double s : schedule_intensities)
        require(s >= 0.0 && s <= 1.0, ErrorKind::Config, "schedule intensity outside [0, 1]");
}

CarbonClass SyntheticSpec::planted_class(int node_index) const {
    return classify_ci(nodes[node_index].base_ci);
}

SyntheticSpec SyntheticSpec::default_eu8(std::uint64_t seed) {
    SyntheticSpec s;
    s.seed = seed;
    s.nodes = {
        {"AT", 95.0, 7000.0, 70.0},  {"CH", 25.0, 6500.0, 62.0},  {"DE", 120.0, 15000.0, 75.0},
        {"FR", 40.0, 14000.0, 60.0}, {"IT", 110.0, 11000.0, 80.0}, {"NL", 100.0, 9000.0, 72.0},
        {"PL", 320.0, 10000.0, 85.0}, {"CZ", 210.0, 7500.0, 78.0},
    };
    s.edges = {{"AT", "CH"}, {"AT", "DE"}, {"AT", "IT"}, {"AT", "CZ"}, {"CH", "DE"},
               {"CH", "FR"}, {"CH", "IT"}, {"DE", "FR"}, {"DE", "NL"}, {"DE", "PL"},
               {"DE", "CZ"}, {"FR", "IT"}, {"PL", "CZ"}};
    s.ci_price_coupling = 0.03;
    s.ci_amp = 0.05;
    s.price_noise_std = 1.0;
    s.price_response[0] = -8.0;
    s.price_response[1] = 1.6;
    s.price_response[2] = 1.3;
    s.ci_response[0] = 0.0;
    s.ci_response[1] = 0.04;
    s.ci_response[2] = 0.22;
    s.schedule_intensities = {0.0, 0.25, 0.5, 0.75, 1.0};
    return s;
}

SyntheticSpec SyntheticSpec::default_eu16(std::uint64_t seed) {
    SyntheticSpec s = default_eu8(seed);
    s.nodes = {
        {"AT", 95.0, 7000.0, 70.0},   {"BE", 120.0, 9500.0, 74.0},  {"CH", 25.0, 6500.0, 62.0},
        {"CZ", 210.0, 7500.0, 78.0},  {"DE", 120.0, 15000.0, 75.0}, {"DK", 110.0, 4500.0, 68.0},
        {"ES", 110.0, 11000.0, 66.0}, {"FR", 40.0, 14000.0, 60.0},  {"HU", 125.0, 5500.0, 76.0},
        {"IT", 110.0, 11000.0, 80.0}, {"NL", 100.0, 9000.0, 72.0},  {"PL", 320.0, 10000.0, 85.0},
        {"PT", 90.0, 5000.0, 64.0},   {"RO", 260.0, 6500.0, 72.0},  {"SE", 30.0, 8000.0, 58.0},
        {"SK", 120.0, 5000.0, 75.0},
    };
    s.edges = {{"AT", "CH"}, {"AT", "DE"}, {"AT", "IT"}, {"AT", "CZ"}, {"AT", "HU"}, {"AT", "SK"},
               {"BE", "FR"}, {"BE", "NL"}, {"BE", "DE"}, {"CH", "DE"}, {"CH", "FR"}, {"CH", "IT"},
               {"CZ", "DE"}, {"CZ", "PL"}, {"CZ", "SK"}, {"DE", "DK"}, {"DE", "FR"}, {"DE", "NL"},
               {"DE", "PL"}, {"DK", "SE"}, {"ES", "FR"}, {"ES", "PT"}, {"FR", "IT"},
               {"HU", "SK"}, {"HU", "RO"}, {"NL", "DK"}, {"PL", "SK"}, {"PL", "SE"}};
    s.ci_phase_jitter = 9.0;
    return s;
}

SyntheticSpec SyntheticSpec::default_eu24(std::uint64_t seed) {
    SyntheticSpec s = default_eu8(seed);
    s.nodes = {
        {"AT", 95.0, 7000.0, 70.0},   {"BE", 120.0, 9500.0, 74.0},  {"BG", 220.0, 4500.0, 70.0},
        {"CH", 25.0, 6500.0, 62.0},   {"CZ", 210.0, 7500.0, 78.0},  {"DE", 120.0, 15000.0, 75.0},
        {"DK", 110.0, 4500.0, 68.0},  {"EE", 180.0, 1500.0, 60.0},  {"ES", 110.0, 11000.0, 66.0},
        {"FI", 60.0, 9500.0, 55.0},   {"FR", 40.0, 14000.0, 60.0},  {"GR", 190.0, 5500.0, 80.0},
        {"HR", 140.0, 2500.0, 72.0},  {"HU", 125.0, 5500.0, 76.0},  {"IT", 110.0, 11000.0, 80.0},
        {"LT", 100.0, 1800.0, 62.0},  {"LV", 90.0, 1200.0, 61.0},   {"NL", 100.0, 9000.0, 72.0},
        {"NO", 20.0, 13000.0, 50.0},  {"PL", 320.0, 10000.0, 85.0}, {"PT", 90.0, 5000.0, 64.0},
        {"RO", 260.0, 6500.0, 72.0},  {"SE", 30.0, 8000.0, 58.0},   {"SK", 120.0, 5000.0, 75.0},
    };
    s.edges = {{"AT", "CH"}, {"AT", "DE"}, {"AT", "IT"}, {"AT", "CZ"}, {"AT", "HU"}, {"AT", "SK"},
               {"BE", "FR"}, {"BE", "NL"}, {"BE", "DE"}, {"BG", "RO"}, {"BG", "GR"}, {"CH", "DE"},
               {"CH", "FR"}, {"CH", "IT"}, {"CZ", "DE"}, {"CZ", "PL"}, {"CZ", "SK"}, {"DE", "DK"},
               {"DE", "FR"}, {"DE", "NL"}, {"DE", "PL"}, {"DK", "SE"}, {"DK", "NO"}, {"EE", "FI"},
               {"EE", "LV"}, {"ES", "FR"}, {"ES", "PT"}, {"FR", "IT"}, {"GR", "IT"}, {"HR", "HU"},
               {"HU", "RO"}, {"HU", "SK"}, {"LT", "LV"}, {"LT", "PL"}, {"LT", "SE"}, {"NL", "DK"},
               {"NL", "NO"}, {"NO", "SE"}, {"PL", "SK"}, {"PL", "SE"}, {"FI", "SE"}};
    s.ci_amp = 0.03;
    s.ci_phase_jitter = 6.0;
    return s;
}

SyntheticOutput generate_synthetic_at_intensity(const SyntheticSpec& spec, std::size_t hours,
                                                double intensity) {
    SyntheticSpec fixed = spec;
    fixed.schedule_intensities = {intensity};
    return generate_synthetic(fixed, hours);
}

SyntheticOutput generate_synthetic(const SyntheticSpec& spec, std::size_t hours) {
    require(hours >= 1, ErrorKind::Config, "hours must be >= 1");
    spec.validate();

    std::vector<std::string> codes;
    codes.reserve(spec.nodes.size());
    for (const auto& n : spec.nodes) codes.push_back(n.code);
    GridGraph graph = GridGraph::from_edge_list(codes, spec.edges);
    const int n = graph.node_count();

    std::vector<CarbonClass> cls(n);
    for (int i = 0; i < n; ++i) cls[i] = spec.planted_class(i);

    // Noise stream does not depend on the schedule: every draw below happens
    // in the same order whatever the intensities are.
    Rng noise(spec.seed);
    Rng schedule_rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
    Rng phase_rng(spec.seed ^ 0x2545F4914F6CDD1DULL);
    std::vector<double> ci_peak(n, 15.0);
    for (int i = 0; i < n; ++i)
        ci_peak[i] += spec.ci_phase_jitter * (2.0 * phase_rng.uniform() - 1.0);

    PolicySchedule schedule;
    schedule.threshold = spec.threshold;
    schedule.ets_price = spec.ets_price;
    const bool policy = !spec.schedule_intensities.empty();
    if (policy) {
        schedule.intensity = ad::Tensor(static_cast<int>(hours), n);
        for (std::size_t t = 0; t < hours; ++t) {
            double uniform_draw = spec.schedule_intensities[
                spec.schedule_intensities.size() == 1
                    ? 0
                    : schedule_rng.index(spec.schedule_intensities.size())];
            for (int i = 0; i < n; ++i) {
                double v = uniform_draw;
                if (spec.schedule_per_node)
                    v = spec.schedule_intensities[spec.schedule_intensities.size() == 1
                                                      ? 0
                                                      : schedule_rng.index(
                                                            spec.schedule_intensities.size())];
                schedule.intensity.at(static_cast<int>(t), i) = v;
            }
        }
    }

    HourlyPanel p;
    p.node_codes = codes;
    p.series.resize(n);
    p.timestamps.reserve(hours);
    for (auto& s : p.series) {
        s.demand.reserve(hours);
        for (auto& g : s.gen) g.reserve(hours);
        s.net_imports.reserve(hours);
        s.price.reserve(hours);
        s.ci.reserve(hours);
    }

    std::vector<double> prev_price(n);
    for (int i = 0; i < n; ++i) prev_price[i] = spec.nodes[i].base_price;

    std::vector<double> demand(n), ci(n), cost(n), price(n);
    for (std::size_t t = 0; t < hours; ++t) {
        const std::int64_t epoch = spec.start_epoch + static_cast<std::int64_t>(t) * kSecondsPerHour;
        p.timestamps.push_back(epoch);
        const int hod = hour_of_day(epoch);

        for (int i = 0; i < n; ++i) {
            const double s_t = policy ? schedule.intensity.at(static_cast<int>(t), i) : 0.0;
            const double xd = noise.normal();
            const double xc = noise.normal();
            demand[i] = spec.nodes[i].base_demand * (1.0 + spec.demand_amp * diurnal(hod, 9.0)) +
                        spec.demand_noise_std * xd;
            double base_ci_t = spec.nodes[i].base_ci * (1.0 + spec.ci_amp * diurnal(hod, ci_peak[i])) +
                               spec.ci_noise_std * xc;
            if (base_ci_t < 0.0) base_ci_t = 0.0;
            const int c = static_cast<int>(cls[i]);
            double v = base_ci_t * (1.0 - spec.ci_response[c] * s_t);
            ci[i] = v < 0.0 ? 0.0 : v;
            cost[i] = std::max(0.0, ci[i] - spec.threshold) * s_t * spec.ets_price / 1000.0;
        }

        for (int i = 0; i < n; ++i) {
            const double xp = noise.normal();
            double neighbor_mean = 0.0;
            if (!graph.neighbors(i).empty()) {
                for (int j : graph.neighbors(i)) neighbor_mean += cost[j];
                neighbor_mean /= static_cast<double>(graph.neighbors(i).size());
            }
            const double exposure =
                spec.own_cost_weight * cost[i] + (1.0 - spec.own_cost_weight) * neighbor_mean;

            double lagged = 0.0;
            for (int j : graph.neighbors(i)) lagged += prev_price[j];

            const double dev = (demand[i] - spec.nodes[i].base_demand) / spec.nodes[i].base_demand;
            const int c = static_cast<int>(cls[i]);
            price[i] = spec.nodes[i].base_price + spec.demand_price_slope * demand[i] +
                       spec.ci_price_coupling * ci[i] + spec.price_response[c] * exposure +
                       spec.demand_quad * dev * dev + spec.spillover_weight * lagged +
                       spec.price_noise_std * xp;
        }

        for (int i = 0; i < n; ++i) {
            NodeSeries& s = p.series[i];
            const double net_imports = 0.03 * spec.nodes[i].base_demand * diurnal(hod, 3.0);
            double gen_total = demand[i] - net_imports;
            if (gen_total < 0.0) gen_total = 0.0;
            double fossil = ci[i] / kCoalEmissionFactor;
            if (fossil > 1.0) fossil = 1.0;
            const double clean = gen_total * (1.0 - fossil);
            const double solar_shape = std::max(0.0, diurnal(hod, 6.0));
            const double solar = 0.15 * clean * solar_shape;
            s.demand.push_back(demand[i]);
            s.gen[0].push_back(gen_total * fossil * 0.65);      // coal
            s.gen[1].push_back(gen_total * fossil * 0.35);      // gas
            s.gen[2].push_back(0.45 * clean);                   // nuclear
            s.gen[3].push_back(0.20 * clean);                   // hydro
            s.gen[4].push_back(0.20 * clean);                   // wind
            s.gen[5].push_back(solar);                          // solar
            s.gen[6].push_back(0.15 * clean - solar);           // other
            s.net_imports.push_back(net_imports);
            s.price.push_back(price[i]);
            s.ci.push_back(ci[i]);
        }
        prev_price = price;
    }

    p.validate();
    if (!policy) schedule.intensity = ad::Tensor();
    return SyntheticOutput{std::move(graph), std::move(p), std::move(schedule)};
}

void save_schedule(const PolicySchedule& schedule, const HourlyPanel& panel, const std::string& path) {
    require(schedule.intensity.rows() == static_cast<int>(panel.hours()) &&
                schedule.intensity.cols() == panel.node_count(),
            ErrorKind::Contract, "save_schedule: schedule does not cover the panel");
    csv::Table t;
    t.header = {"timestamp", "threshold", "ets_price"};
    for (const auto& code : panel.node_codes) t.header.push_back("intensity_" + code);
    for (std::size_t h = 0; h < panel.hours(); ++h) {
        std::vector<std::string> row = {format_iso8601(panel.timestamps[h]),
                                        csv::format_double(schedule.threshold),
                                        csv::format_double(schedule.ets_price)};
        for (int i = 0; i < panel.node_count(); ++i)
            row.push_back(csv::format_double(schedule.intensity.at(static_cast<int>(h), i)));
        t.rows.push_back(std::move(row));
    }
    csv::write_file(path, t);
}

PolicySchedule load_schedule(const std::string& path, const HourlyPanel& panel) {
    csv::Table t = csv::read_file(path);
    const std::size_t c_ts = t.column("timestamp");
    const std::size_t c_thr = t.column("threshold");
    const std::size_t c_ets = t.column("ets_price");
    std::vector<std::size_t> c_int;
    for (const auto& code : panel.node_codes) c_int.push_back(t.column("intensity_" + code));
    require(t.rows.size() == panel.hours(), ErrorKind::Integrity,
            path + ": schedule has " + std::to_string(t.rows.size()) + " rows, panel has " +
                std::to_string(panel.hours()));
    PolicySchedule s;
    s.intensity = ad::Tensor(static_cast<int>(panel.hours()), panel.node_count());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string ctx = path + " row " + std::to_string(r + 2);
        if (parse_iso8601(t.rows[r][c_ts]) != panel.timestamps[r])
            raise(ErrorKind::Integrity, ctx + ": timestamp does not match the panel axis");
        s.threshold = csv::parse_double(t.rows[r][c_thr], ctx);
        s.ets_price = csv::parse_double(t.rows[r][c_ets], ctx);
        for (int i = 0; i < panel.node_count(); ++i)
            s.intensity.at(static_cast<int>(r), i) = csv::parse_double(t.rows[r][c_int[i]], ctx);
    }
    return s;
}

// ------------------------------------------------------------- config I/O

SyntheticSpec SyntheticSpec::from_config(const KvConfig& cfg) {
    SyntheticSpec s;
    s.seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
    for (const auto& code : cfg.get_list("nodes")) {
        SyntheticNode n;
        n.code = code;
        n.base_ci = cfg.get_double("base_ci." + code);
        n.base_demand = cfg.get_double_or("base_demand." + code, 10000.0);
        n.base_price = cfg.get_double_or("base_price." + code, 70.0);
        s.nodes.push_back(n);
    }
    s.edges.clear();
    if (cfg.has("edges")) {
        for (const auto& e : cfg.get_list("edges")) {
            auto dash = e.find('-');
            if (dash == std::string::npos)
                raise(ErrorKind::Config, "edge '" + e + "' must be `A-B`");
            s.edges.emplace_back(e.substr(0, dash), e.substr(dash + 1));
        }
    }
    s.demand_price_slope = cfg.get_double_or("demand_price_slope", s.demand_price_slope);
    s.ci_price_coupling = cfg.get_double_or("ci_price_coupling", s.ci_price_coupling);
    s.spillover_weight = cfg.get_double_or("spillover_weight", s.spillover_weight);
    s.price_noise_std = cfg.get_double_or("price_noise_std", s.price_noise_std);
    s.demand_noise_std = cfg.get_double_or("demand_noise_std", s.demand_noise_std);
    s.ci_noise_std = cfg.get_double_or("ci_noise_std", s.ci_noise_std);
    s.demand_amp = cfg.get_double_or("demand_amp", s.demand_amp);
    s.ci_amp = cfg.get_double_or("ci_amp", s.ci_amp);
    s.ci_phase_jitter = cfg.get_double_or("ci_phase_jitter", s.ci_phase_jitter);
    s.demand_quad = cfg.get_double_or("demand_quad", s.demand_quad);
    s.price_response[0] = cfg.get_double_or("price_response.low", 0.0);
    s.price_response[1] = cfg.get_double_or("price_response.medium", 0.0);
    s.price_response[2] = cfg.get_double_or("price_response.high", 0.0);
    s.ci_response[0] = cfg.get_double_or("ci_response.low", 0.0);
    s.ci_response[1] = cfg.get_double_or("ci_response.medium", 0.0);
    s.ci_response[2] = cfg.get_double_or("ci_response.high", 0.0);
    s.own_cost_weight = cfg.get_double_or("own_cost_weight", s.own_cost_weight);
    s.threshold = cfg.get_double_or("threshold", s.threshold);
    s.ets_price = cfg.get_double_or("ets_price", s.ets_price);
    s.schedule_intensities.clear();
    if (cfg.has("schedule_intensities")) {
        for (const auto& v : cfg.get_list("schedule_intensities"))
            s.schedule_intensities.push_back(csv::parse_double(v, "schedule_intensities"));
    }
    s.schedule_per_node = cfg.get_int_or("schedule_per_node", 1) != 0;
    if (cfg.has("start_time")) s.start_epoch = parse_iso8601(cfg.get_string("start_time"));
    return s;
}

std::string SyntheticSpec::to_config_text() const {
    std::ostringstream out;
    out << "seed = " << seed << "\n";
    out << "nodes = ";
    for (std::size_t i = 0; i < nodes.size(); ++i) out << (i ? "," : "") << nodes[i].code;
    out << "\n";
    out << "edges = ";
    for (std::size_t i = 0; i < edges.size(); ++i)
        out << (i ? "," : "") << edges[i].first << "-" << edges[i].second;
    out << "\n";
    for (const auto& n : nodes) {
        out << "base_ci." << n.code << " = " << csv::format_double(n.base_ci) << "\n";
        out << "base_demand." << n.code << " = " << csv::format_double(n.base_demand) << "\n";
        out << "base_price." << n.code << " = " << csv::format_double(n.base_price) << "\n";
    }
    out << "demand_price_slope = " << csv::format_double(demand_price_slope) << "\n";
    out << "ci_price_coupling = " << csv::format_double(ci_price_coupling) << "\n";
    out << "spillover_weight = " << csv::format_double(spillover_weight) << "\n";
    out << "price_noise_std = " << csv::format_double(price_noise_std) << "\n";
    out << "demand_noise_std = " << csv::format_double(demand_noise_std) << "\n";
    out << "ci_noise_std = " << csv::format_double(ci_noise_std) << "\n";
    out << "demand_amp = " << csv::format_double(demand_amp) << "\n";
    out << "ci_amp = " << csv::format_double(ci_amp) << "\n";
    out << "ci_phase_jitter = " << csv::format_double(ci_phase_jitter) << "\n";
    out << "demand_quad = " << csv::format_double(demand_quad) << "\n";
    out << "price_response.low = " << csv::format_double(price_response[0]) << "\n";
    out << "price_response.medium = " << csv::format_double(price_response[1]) << "\n";
    out << "price_response.high = " << csv::format_double(price_response[2]) << "\n";
    out << "ci_response.low = " << csv::format_double(ci_response[0]) << "\n";
    out << "ci_response.medium = " << csv::format_double(ci_response[1]) << "\n";
    out << "ci_response.high = " << csv::format_double(ci_response[2]) << "\n";
    out << "own_cost_weight = " << csv::format_double(own_cost_weight) << "\n";
    out << "threshold = " << csv::format_double(threshold) << "\n";
    out << "ets_price = " << csv::format_double(ets_price) << "\n";
    if (!schedule_intensities.empty()) {
        out << "schedule_intensities = ";
        for (std::size_t i = 0; i < schedule_intensities.size(); ++i)
            out << (i ? "," : "") << csv::format_double(schedule_intensities[i]);
        out << "\n";
        out << "schedule_per_node = " << (schedule_per_node ? 1 : 0) << "\n";
    }
    out << "start_time = " << format_iso8601(start_epoch) << "\n";
    return out.str();
}

}  // namespace cbamgrid::grid
