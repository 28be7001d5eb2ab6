#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hawkesnet {

class EventError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// p sorted event-time sequences on (0, T]. The sole input to estimation.
struct EventData {
    int p = 0;
    double horizon_T = 0.0;
    std::vector<std::vector<double>> times;  // strictly increasing per node
    std::uint64_t seed = 0;                  // generating seed, if simulated
    std::string model_hash;                  // generating model hash, if any

    std::size_t total_events() const;
    void check() const;  // throws EventError on invariant violations

    // CSV with header `node,time`; 17 significant digits.
    void write_csv(std::ostream& out) const;
    static EventData read_csv(std::istream& in, int p, double horizon_T);

    // JSON-lines, one record per event: {"node":k,"time":t}
    void write_jsonl(std::ostream& out) const;
    static EventData read_jsonl(std::istream& in, int p, double horizon_T);
};

}  // namespace hawkesnet
