#include "hawkesnet/event_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace hawkesnet {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_events_csv(const EventLog& log, std::ostream& out) {
    struct Row {
        double time;
        std::size_t node;
    };
    std::vector<Row> rows;
    rows.reserve(log.total_events());
    for (std::size_t i = 0; i < log.d; ++i) {
        for (double t : log.events[i]) {
            rows.push_back(Row{t, i});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.time < b.time || (a.time == b.time && a.node < b.node);
    });
    out << "node,time\n";
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", row.node, row.time);
        out << buf;
    }
}

void write_events_csv(const EventLog& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_events_csv(log, out);
}

nlohmann::json meta_to_json(const EventLog& log) {
    return {
        {"d", log.d},
        {"t_start", log.t_start},
        {"t_end", log.t_end},
        {"seed", log.seed},
        {"method", to_string(log.method)},
        {"beta", log.beta},
    };
}

void write_meta(const EventLog& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << meta_to_json(log).dump(2) << '\n';
}

EventLog read_event_log(std::istream& csv, const nlohmann::json& meta) {
    EventLog log;
    log.d = meta.at("d").get<std::size_t>();
    log.t_start = meta.at("t_start").get<double>();
    log.t_end = meta.at("t_end").get<double>();
    log.seed = meta.value("seed", std::uint64_t{0});
    log.method = parse_simulation_method(meta.value("method", std::string("thinning")));
    log.beta = meta.value("beta", 1.0);
    log.events.resize(log.d);

    std::string line;
    if (!std::getline(csv, line) || line.rfind("node,time", 0) != 0) {
        throw std::runtime_error("event CSV must start with header 'node,time'");
    }
    std::size_t line_no = 1;
    while (std::getline(csv, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        std::size_t node = 0;
        double t = 0.0;
        const char* first = line.data();
        const char* last = line.data() + line.size();
        const auto r1 = std::from_chars(first, first + (comma == std::string::npos ? 0 : comma), node);
        const auto r2 = comma == std::string::npos ? std::from_chars_result{first, std::errc::invalid_argument}
                                                   : std::from_chars(first + comma + 1, last, t);
        if (comma == std::string::npos || r1.ec != std::errc{} || r2.ec != std::errc{} || r2.ptr != last) {
            throw std::runtime_error("malformed event row at line " + std::to_string(line_no));
        }
        if (node >= log.d) {
            throw std::runtime_error("event node out of range at line " + std::to_string(line_no));
        }
        if (t < log.t_start || t > log.t_end) {
            throw std::runtime_error("event time outside [t_start, t_end] at line " + std::to_string(line_no));
        }
        auto& e = log.events[node];
        if (!e.empty() && !(t > e.back())) {
            throw std::runtime_error("event times for a node must be strictly increasing (line " +
                                     std::to_string(line_no) + ")");
        }
        e.push_back(t);
    }
    return log;
}

EventLog read_event_log(const std::filesystem::path& csv, const std::filesystem::path& meta) {
    std::ifstream meta_in(meta);
    if (!meta_in) {
        throw std::runtime_error("cannot open " + meta.string());
    }
    std::ifstream csv_in(csv);
    if (!csv_in) {
        throw std::runtime_error("cannot open " + csv.string());
    }
    return read_event_log(csv_in, nlohmann::json::parse(meta_in));
}

} // namespace hawkesnet
