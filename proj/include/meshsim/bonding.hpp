#pragma once

// Virtual interface mastering a node's data interfaces. The transmit
// slave is chosen per packet from the latest negotiation packet stored
// for the next hop.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meshsim/core.hpp"
#include "meshsim/negotiation.hpp"

namespace meshsim::bonding {

struct Counters {
    std::uint64_t selects = 0;
    std::uint64_t switches = 0;   // channel_meu changes
    std::uint64_t fallbacks = 0;  // requested channel not tuned on any slave
    std::uint64_t probes = 0;     // ring steps
};

class Bond {
  public:
    // Throws TopologyError when `slaves` is empty, contains a
    // non-data interface or the same interface twice.
    Bond(NodeId node, std::vector<Interface> slaves, std::string name = "bond0");

    const std::string& name() const { return name_; }
    NodeId node() const { return node_; }
    const std::vector<Interface>& slaves() const { return slaves_; }
    const Interface& current_slave() const { return slaves_[cursor_]; }
    int channel_meu() const { return slaves_[cursor_].channel.index; }
    MacAddress unified_mac() const { return mac_; }
    Address unified_ip() const { return ip_; }
    const Counters& counters() const { return counters_; }

    // Rejects interfaces already enslaved here.
    void enslave(const Interface& iface);

    void store_packet(const negotiation::NegotiationPacket& pkt);
    const negotiation::NegotiationPacket* stored(Address neighbor) const;

    // Chooses the transmit slave for a packet towards next_hop, rotating
    // the ring when the stored channel differs from channel_meu.
    const Interface& xmit_select(const PacketRecord& packet, Address next_hop);

    // Slave xmit_select would return, without moving the cursor.
    const Interface& resolve(Address next_hop) const;

  private:
    std::optional<std::size_t> wanted_slave(Address next_hop, std::uint64_t* probes) const;

    NodeId node_;
    std::string name_;
    std::vector<Interface> slaves_;
    std::size_t cursor_ = 0;
    MacAddress mac_;
    Address ip_;
    std::map<Address, negotiation::NegotiationPacket> store_;
    Counters counters_;
};

// Bond over every data interface of `node`, in interface order.
Bond enslave(const Node& node);

}  // namespace meshsim::bonding
