#pragma once

#include <map>
#include <string>

#include "lsdsim/amm.hpp"
#include "lsdsim/lsd.hpp"

namespace lsdsim {

// Canonical key-sorted text codec. Encoders flatten structs into `key=value`
// pairs; the blob writer sorts keys and frames them with a header and a
// line-count footer so truncation is detectable.
using KvMap = std::map<std::string, std::string>;

void encode(KvMap& kv, const std::string& prefix, const RebasingLsd& s);
void encode(KvMap& kv, const std::string& prefix, const RewardBearingLsd& s);
void encode(KvMap& kv, const std::string& prefix, const DualTokenLsd& s);
void encode(KvMap& kv, const std::string& prefix, const Pool& pool);

RebasingLsd decode_rebasing(const KvMap& kv, const std::string& prefix);
RewardBearingLsd decode_reward_bearing(const KvMap& kv, const std::string& prefix);
Pool decode_pool(const KvMap& kv, const std::string& prefix);

std::string kv_to_blob(const KvMap& kv);
KvMap blob_to_kv(const std::string& blob); // CorruptSnapshot on framing damage

// Single-struct snapshots (the canonical state dumps of the token and pool
// modules).
std::string snapshot_text(const RebasingLsd& s);
std::string snapshot_text(const RewardBearingLsd& s);
std::string snapshot_text(const Pool& pool);

} // namespace lsdsim
