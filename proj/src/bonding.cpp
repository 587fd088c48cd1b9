#include "meshsim/bonding.hpp"

#include <algorithm>

namespace meshsim::bonding {

Bond::Bond(NodeId node, std::vector<Interface> slaves, std::string name)
    : node_(node), name_(std::move(name)) {
    if (slaves.empty()) throw TopologyError("bond on node " + std::to_string(node) + " needs a data interface");
    for (const auto& s : slaves) enslave(s);
}

void Bond::enslave(const Interface& iface) {
    if (iface.role != InterfaceRole::Data)
        throw TopologyError("cannot enslave non-data interface " + iface.name);
    for (const auto& s : slaves_)
        if (s.id == iface.id || s.name == iface.name)
            throw TopologyError("interface " + iface.name + " is already enslaved to " + name_);
    if (slaves_.empty()) {
        mac_ = iface.mac;
        ip_ = iface.ip;
    }
    Interface s = iface;
    s.mac = mac_;
    s.ip = ip_;
    slaves_.push_back(std::move(s));
}

void Bond::store_packet(const negotiation::NegotiationPacket& pkt) { store_[pkt.dir_ip] = pkt; }

const negotiation::NegotiationPacket* Bond::stored(Address neighbor) const {
    auto it = store_.find(neighbor);
    return it == store_.end() ? nullptr : &it->second;
}

std::optional<std::size_t> Bond::wanted_slave(Address next_hop, std::uint64_t* probes) const {
    const auto* pkt = stored(next_hop);
    if (!pkt || pkt->channel == 0 || pkt->channel == channel_meu()) return cursor_;
    std::size_t i = cursor_;
    for (std::size_t step = 0; step < slaves_.size(); ++step) {
        i = (i + 1) % slaves_.size();
        if (probes) ++*probes;
        if (slaves_[i].channel.index == pkt->channel) return i;
    }
    return std::nullopt;
}

const Interface& Bond::xmit_select(const PacketRecord&, Address next_hop) {
    ++counters_.selects;
    auto want = wanted_slave(next_hop, &counters_.probes);
    if (!want) {
        ++counters_.fallbacks;
        return slaves_[cursor_];
    }
    if (*want != cursor_) {
        cursor_ = *want;
        ++counters_.switches;
    }
    return slaves_[cursor_];
}

const Interface& Bond::resolve(Address next_hop) const {
    auto want = wanted_slave(next_hop, nullptr);
    return slaves_[want.value_or(cursor_)];
}

Bond enslave(const Node& node) {
    std::vector<Interface> data;
    for (const auto* i : node.data_interfaces()) data.push_back(*i);
    return Bond(node.id, std::move(data));
}

}  // namespace meshsim::bonding
