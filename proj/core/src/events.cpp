#include "hawkesnet/events.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace hawkesnet {

std::size_t EventData::total_events() const {
    std::size_t n = 0;
    for (const auto& v : times) n += v.size();
    return n;
}

void EventData::check() const {
    if ((int)times.size() != p) throw EventError("node count mismatch");
    for (int j = 0; j < p; ++j) {
        double prev = 0.0;
        for (double t : times[j]) {
            if (!(t > prev)) throw EventError("event times must be strictly increasing and > 0");
            if (t > horizon_T) throw EventError("event time past horizon");
            prev = t;
        }
    }
}

namespace {
std::string fmt17(double t) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", t);
    return buf;
}
}  // namespace

void EventData::write_csv(std::ostream& out) const {
    out << "node,time\n";
    // Global time order keeps files mergeable and diffs stable.
    std::vector<std::pair<double, int>> all;
    all.reserve(total_events());
    for (int j = 0; j < p; ++j)
        for (double t : times[j]) all.push_back({t, j});
    std::sort(all.begin(), all.end());
    for (const auto& [t, j] : all) out << j << ',' << fmt17(t) << '\n';
}

EventData EventData::read_csv(std::istream& in, int p, double horizon_T) {
    EventData d;
    d.p = p;
    d.horizon_T = horizon_T;
    d.times.resize(p);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("node", 0) == 0) continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw EventError("malformed CSV line: " + line);
        const int j = std::stoi(line.substr(0, comma));
        const double t = std::stod(line.substr(comma + 1));
        if (j < 0 || j >= p) throw EventError("node index out of range in CSV");
        d.times[j].push_back(t);
    }
    for (auto& v : d.times) std::sort(v.begin(), v.end());
    d.check();
    return d;
}

void EventData::write_jsonl(std::ostream& out) const {
    std::vector<std::pair<double, int>> all;
    all.reserve(total_events());
    for (int j = 0; j < p; ++j)
        for (double t : times[j]) all.push_back({t, j});
    std::sort(all.begin(), all.end());
    for (const auto& [t, j] : all)
        out << "{\"node\":" << j << ",\"time\":" << fmt17(t) << "}\n";
}

EventData EventData::read_jsonl(std::istream& in, int p, double horizon_T) {
    EventData d;
    d.p = p;
    d.horizon_T = horizon_T;
    d.times.resize(p);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto rec = nlohmann::json::parse(line);
        const int j = rec.at("node");
        if (j < 0 || j >= p) throw EventError("node index out of range in JSONL");
        d.times[j].push_back(rec.at("time").get<double>());
    }
    for (auto& v : d.times) std::sort(v.begin(), v.end());
    d.check();
    return d;
}

}  // namespace hawkesnet
