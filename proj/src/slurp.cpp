#include "qtn/slurp.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qtn/errors.hpp"
#include "qtn/narayana.hpp"
#include "qtn/statistics.hpp"

namespace qtn {

using nlohmann::json;

std::string BagKey::text() const {
  if (m < 0) return "u=" + std::to_string(u);
  return "m=" + std::to_string(m) + ",u=" + std::to_string(u);
}

long long Bag::target_mass() const {
  long long mass = 0;
  for (const auto& [value, count] : target) mass += count;
  return mass;
}

std::vector<NCPartition> SlurpInstance::decode() const {
  std::vector<NCPartition> out;
  out.reserve(objects.size());
  for (const auto& text : objects) out.push_back(parse_nc(text, n));
  return out;
}

namespace {

void check_consistency(const SlurpInstance& inst) {
  std::vector<char> covered(inst.objects.size(), 0);
  for (std::size_t i = 0; i + 1 < inst.bags.size(); ++i)
    if (!(inst.bags[i].key < inst.bags[i + 1].key))
      throw DatasetError(DatasetCode::Consistency, "bags out of order");
  for (const auto& bag : inst.bags) {
    if ((bag.key.m >= 0) != inst.refined)
      throw DatasetError(DatasetCode::Consistency, "bag key shape disagrees with refined flag");
    if (bag.members.empty())
      throw DatasetError(DatasetCode::Consistency, "empty bag " + bag.key.text());
    if (bag.target_mass() != static_cast<long long>(bag.members.size()))
      throw DatasetError(DatasetCode::Consistency,
                         "bag " + bag.key.text() + " target mass differs from its size");
    for (int idx : bag.members) {
      if (idx < 0 || idx >= static_cast<int>(inst.objects.size()))
        throw DatasetError(DatasetCode::Consistency, "bag member index out of range");
      if (covered[static_cast<std::size_t>(idx)])
        throw DatasetError(DatasetCode::Consistency, "object in two bags");
      covered[static_cast<std::size_t>(idx)] = 1;
    }
    for (const auto& [value, count] : bag.target)
      if (value < 0 || count <= 0)
        throw DatasetError(DatasetCode::Consistency, "bad target entry");
  }
  for (char c : covered)
    if (!c) throw DatasetError(DatasetCode::Consistency, "object in no bag");

  for (const auto& text : inst.objects) {
    NCPartition p = parse_nc(text, inst.n);
    if (static_cast<int>(p.blocks.size()) != inst.n - inst.k + 1)
      throw DatasetError(DatasetCode::Consistency, "object block count disagrees with k");
  }
}

template <class KeyFn>
std::vector<Bag> group_members(const std::vector<NCPartition>& objects, KeyFn key_fn) {
  std::map<BagKey, std::vector<int>> groups;
  for (std::size_t i = 0; i < objects.size(); ++i)
    groups[key_fn(objects[i])].push_back(static_cast<int>(i));
  std::vector<Bag> bags;
  for (auto& [key, members] : groups) bags.push_back(Bag{key, std::move(members), {}});
  return bags;
}

}  // namespace

SlurpInstance build_instance(int n, int k, bool refined) {
  SlurpInstance inst;
  inst.n = n;
  inst.k = k;
  inst.refined = refined;
  auto partitions = enumerate_nc(n, k);
  inst.objects.reserve(partitions.size());
  for (const auto& p : partitions) inst.objects.push_back(serialize_nc(p));

  if (!refined) {
    inst.bags = group_members(partitions, [](const NCPartition& p) {
      return BagKey{-1, static_cast<int>(skip(p))};
    });
    QTPolynomial poly = qt_narayana(n, k);
    for (auto& bag : inst.bags)
      for (const auto& [key, c] : poly.terms())
        if (key.first == bag.key.u) bag.target[key.second] = c;
  } else {
    inst.bags = group_members(partitions, [](const NCPartition& p) {
      return BagKey{m_of(p), static_cast<int>(skip(p))};
    });
    for (auto& bag : inst.bags) {
      if (bag.key.m == 0) {
        // Only k=1 reaches this: the lone all-singleton object, constant 0.
        bag.target[0] = static_cast<long long>(bag.members.size());
        continue;
      }
      QTPolynomial poly = incremental(bag.key.m, k);
      for (const auto& [key, c] : poly.terms())
        if (key.first == bag.key.u) bag.target[key.second] = c;
    }
  }
  check_consistency(inst);
  return inst;
}

SlurpInstance instance_from_values(int n, int k, bool refined,
                                   const std::vector<long long>& values) {
  SlurpInstance inst = build_instance(n, k, refined);
  if (values.size() != inst.objects.size())
    throw ArgumentError("instance_from_values needs one value per object");
  for (auto& bag : inst.bags) {
    bag.target.clear();
    for (int idx : bag.members) {
      long long v = values[static_cast<std::size_t>(idx)];
      if (v < 0) throw ArgumentError("planted values must be nonnegative");
      ++bag.target[v];
    }
  }
  check_consistency(inst);
  return inst;
}

std::uint64_t delta(const std::vector<long long>& values, const SlurpInstance& inst) {
  if (values.size() != inst.objects.size())
    throw ArgumentError("delta needs one value per object");
  std::uint64_t total = 0;
  for (const auto& bag : inst.bags) {
    std::map<long long, long long> observed;
    for (int idx : bag.members) ++observed[values[static_cast<std::size_t>(idx)]];
    for (const auto& [value, count] : bag.target) {
      auto it = observed.find(value);
      long long got = it == observed.end() ? 0 : it->second;
      total += static_cast<std::uint64_t>(std::abs(count - got));
    }
    for (const auto& [value, count] : observed)
      if (!bag.target.count(value)) total += static_cast<std::uint64_t>(count);
  }
  return total;
}

std::uint64_t sorted_l1(const std::vector<long long>& values, const SlurpInstance& inst) {
  if (values.size() != inst.objects.size())
    throw ArgumentError("sorted_l1 needs one value per object");
  std::uint64_t total = 0;
  for (const auto& bag : inst.bags) {
    std::vector<long long> observed, expected;
    for (int idx : bag.members) observed.push_back(values[static_cast<std::size_t>(idx)]);
    for (const auto& [value, count] : bag.target)
      for (long long i = 0; i < count; ++i) expected.push_back(value);
    std::sort(observed.begin(), observed.end());
    if (observed.size() != expected.size())
      throw DatasetError(DatasetCode::Consistency, "bag mass mismatch");
    for (std::size_t i = 0; i < observed.size(); ++i)
      total += static_cast<std::uint64_t>(std::abs(observed[i] - expected[i]));
  }
  return total;
}

std::string instance_to_json(const SlurpInstance& inst) {
  json root;
  root["n"] = inst.n;
  root["k"] = inst.k;
  root["refined"] = inst.refined;
  root["objects"] = inst.objects;
  json bags = json::array();
  for (const auto& bag : inst.bags) {
    json jb;
    if (inst.refined) jb["key"] = {{"m", bag.key.m}, {"u", bag.key.u}};
    else jb["key"] = {{"u", bag.key.u}};
    jb["members"] = bag.members;
    json target;
    for (const auto& [value, count] : bag.target)
      target[std::to_string(value)] = count;
    jb["target"] = target;
    bags.push_back(jb);
  }
  root["bags"] = bags;
  return root.dump(2) + "\n";
}

SlurpInstance instance_from_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw DatasetError(DatasetCode::Format, std::string("bad instance JSON: ") + e.what());
  }
  SlurpInstance inst;
  try {
    inst.n = root.at("n").get<int>();
    inst.k = root.at("k").get<int>();
    inst.refined = root.at("refined").get<bool>();
    inst.objects = root.at("objects").get<std::vector<std::string>>();
    for (const auto& jb : root.at("bags")) {
      Bag bag;
      const auto& key = jb.at("key");
      bag.key.u = key.at("u").get<int>();
      if (inst.refined) bag.key.m = key.at("m").get<int>();
      bag.members = jb.at("members").get<std::vector<int>>();
      for (const auto& [value_text, count] : jb.at("target").items())
        bag.target[std::stoll(value_text)] = count.get<long long>();
      inst.bags.push_back(std::move(bag));
    }
  } catch (const json::exception& e) {
    throw DatasetError(DatasetCode::Format, std::string("instance fields: ") + e.what());
  } catch (const std::logic_error& e) {
    throw DatasetError(DatasetCode::Format, std::string("instance fields: ") + e.what());
  }
  try {
    check_consistency(inst);
  } catch (const ParseError& e) {
    throw DatasetError(DatasetCode::Consistency, std::string("object text: ") + e.what());
  }
  return inst;
}

void write_instance(const SlurpInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << instance_to_json(inst);
  if (!out) throw Error("write failed: " + path);
}

SlurpInstance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

std::string instance_to_csv(const SlurpInstance& inst) {
  std::string out = "partition,skip,m,bag\n";
  auto partitions = inst.decode();
  std::vector<const Bag*> bag_of(inst.objects.size(), nullptr);
  for (const auto& bag : inst.bags)
    for (int idx : bag.members) bag_of[static_cast<std::size_t>(idx)] = &bag;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    out += inst.objects[i];
    out += ',' + std::to_string(skip(partitions[i]));
    out += ',' + std::to_string(m_of(partitions[i]));
    out += ",\"" + bag_of[i]->key.text() + "\"\n";
  }
  return out;
}

}  // namespace qtn
