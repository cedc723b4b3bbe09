#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>

namespace drbac::cost {

using CostUnits = std::uint64_t;

// Dimensionless unit prices. The deploy bases default to the calibration
// figures the scaling model is documented against; every scaling property in
// this module is independent of the concrete values.
struct CostSchedule {
  CostUnits read_cost = 100;
  CostUnits write_cost = 500;
  CostUnits compare_cost = 3;
  CostUnits hash_cost = 30;
  CostUnits deploy_base_dynamic = 9'536'190;
  CostUnits deploy_base_static = 359'268;
};

struct CostReceipt {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t compares = 0;
  std::uint64_t hashes = 0;
  CostUnits total = 0;

  bool operator==(const CostReceipt&) const = default;
};

// Accumulates counters along an evaluation path; finalize() prices them.
class CostCounter {
 public:
  void add_reads(std::uint64_t n) { reads_ += n; }
  void add_writes(std::uint64_t n) { writes_ += n; }
  void add_compares(std::uint64_t n) { compares_ += n; }
  void add_hashes(std::uint64_t n) { hashes_ += n; }

  CostReceipt finalize(const CostSchedule& schedule) const {
    CostReceipt receipt{reads_, writes_, compares_, hashes_, 0};
    receipt.total = reads_ * schedule.read_cost + writes_ * schedule.write_cost +
                    compares_ * schedule.compare_cost + hashes_ * schedule.hash_cost;
    return receipt;
  }

 private:
  std::uint64_t reads_ = 0;
  std::uint64_t writes_ = 0;
  std::uint64_t compares_ = 0;
  std::uint64_t hashes_ = 0;
};

void to_json(nlohmann::json& j, const CostReceipt& receipt);

}  // namespace drbac::cost
