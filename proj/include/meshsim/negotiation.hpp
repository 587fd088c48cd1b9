#pragma once

// Per-link channel negotiation. Every node runs a client towards each
// adjacent peer and a server answering its peers. A round: exchange data
// MACs once, the client scans and reports its quality list, the server
// merges it with its own scan, proposes the best channel, the client
// applies the switch threshold and publishes the outcome to its bond.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meshsim/core.hpp"

namespace meshsim::negotiation {

constexpr double kFloorDbm = -100.0;

// Interference level per channel of one band, dBm. Larger is worse.
class QualityList {
  public:
    explicit QualityList(Band band = Band::B24);

    Band band() const { return band_; }
    std::size_t size() const { return dbm_.size(); }

    double at_index(std::size_t i) const { return dbm_.at(i); }
    void set_index(std::size_t i, double dbm);
    // Throws DomainError for channels outside the band.
    double at_channel(int channel) const;
    void set_channel(int channel, double dbm);

    const std::vector<double>& values() const { return dbm_; }
    bool operator==(const QualityList&) const = default;

  private:
    Band band_;
    std::vector<double> dbm_;
};

// Position of `channel` in the band's channel list; throws DomainError.
std::size_t channel_index(Band band, int channel);

struct Params {
    std::vector<int> allowed_channels;  // empty: taken from the node's data interfaces
    int window_halfwidth = 4;
    double switch_threshold_dbm = 3.0;
    double refresh_weight = 0.0;
    double round_period_s = 10.0;
    double first_round_s = 1.0;
    double timeout_s = 0.5;
    // 0: candidates are the allowed channels. k > 0: walk the band's list
    // with stride k from its first entry, keeping allowed channels only.
    int separacio = 0;

    void validate() const;
};

// Element-wise maximum. Throws DomainError across bands.
QualityList merge_quality(const QualityList& a, const QualityList& b);

// Largest value over the list indices [i-w, i+w] clamped to the band.
double window_score(const QualityList& q, int channel, int halfwidth);

// Candidate with the lowest window score; ties keep the earlier
// candidate. Throws DomainError when there is no candidate.
int select_channel(const QualityList& q, const Params& params);

enum class Decision { Keep, Switch };

Decision decide_switch(int current_channel, int proposed_channel, double q_current_dbm,
                       double q_proposed_dbm, const Params& params);

// w * q_new + (1 - w) * q_old, element-wise.
QualityList ponderate_quality(const QualityList& q_new, const QualityList& q_old, double w);

// Links in (min id, max id) order each take the allowed channel least
// used by already assigned links touching either endpoint; ties go to
// the lowest channel. `usable`, when set, restricts the channels a link
// may take; links left without a usable channel stay unassigned.
std::map<Edge, Channel> initial_assignment(const Topology& topo, Band band,
                                           const std::vector<int>& allowed_channels,
                                           const std::function<bool(const Edge&, int)>& usable = {});

// Handed to the interface selector.
struct NegotiationPacket {
    Address dir_ip;       // neighbour's bond address
    std::string mac;      // neighbour's data MAC, text form
    int channel = 0;      // channel to use towards the neighbour, 0 = none
    int channel_meu = 0;  // channel the link was on before this decision

    bool operator==(const NegotiationPacket&) const = default;
};

// External interference source.
struct Interferer {
    Time on;
    Time off = Time::never();
    Channel channel;
    double level_dbm = -50.0;
    std::vector<NodeId> nodes;        // audible at these nodes, or
    std::optional<Position> center;   // at nodes within `radius_m` of this point
    double radius_m = 0.0;

    bool active(Time t) const { return on <= t && t < off; }
    bool audible_at(const Node& n) const;
};

using ScanProvider = std::function<QualityList(NodeId, Time)>;

// Per channel, the strongest active interferer audible at the node. The
// network's own transmissions never show up in a scan.
QualityList default_scan(const Topology& topo, const std::vector<Interferer>& interferers, NodeId node,
                         Time now, Band band);

enum class MsgKind { MacRequest, MacReply, QualityReport, ChannelProposal, DecisionNotice };

std::string to_string(MsgKind k);

struct Msg {
    MsgKind kind = MsgKind::MacRequest;
    NodeId from = 0;
    NodeId to = 0;
    int round = 0;
    std::string mac;
    std::optional<QualityList> quality;
    std::vector<int> allowed;
    int current_channel = 0;
    int channel = 0;
    double score_current = kFloorDbm;
    double score_proposed = kFloorDbm;
};

struct RoundTimer {
    NodeId peer = 0;
    int round = 0;
};

struct Outbox {
    std::vector<Msg> messages;
    std::vector<NegotiationPacket> published;
    std::vector<RoundTimer> timers;  // fire after Params::timeout_s

    void append(Outbox&& o);
};

struct AgentStats {
    std::uint64_t rounds = 0;
    std::uint64_t switches = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t messages_sent = 0;
};

class Agent {
  public:
    Agent(NodeId self, Band band, std::vector<int> allowed, std::string own_mac, Params params,
          ScanProvider scan);

    NodeId id() const { return self_; }
    const Params& params() const { return params_; }

    void add_peer(NodeId peer, Address peer_bond_ip, int initial_channel);
    std::vector<NodeId> peers() const;
    int link_channel(NodeId peer) const;
    std::optional<std::string> peer_mac(NodeId peer) const;
    const AgentStats& stats() const { return stats_; }

    // Starts one client session per peer.
    Outbox start_round(Time now);
    Outbox on_message(const Msg& m, Time now);
    Outbox on_timeout(const RoundTimer& t, Time now);

  private:
    enum class Stage { Idle, AwaitMac, AwaitProposal };
    struct Peer {
        Address bond_ip;
        int channel = 0;
        std::optional<std::string> mac;
        Stage stage = Stage::Idle;
        int round = 0;
        std::optional<QualityList> history;  // server-side blended list
    };

    Msg to_peer(NodeId peer, MsgKind kind) const;
    Outbox send_report(NodeId peer, Peer& p, Time now);
    Outbox publish(Peer& p, int channel, int previous);

    NodeId self_;
    Band band_;
    std::vector<int> allowed_;
    std::string own_mac_;
    Params params_;
    ScanProvider scan_;
    std::map<NodeId, Peer> peers_;
    AgentStats stats_;
};

// Runs one round among `agents` with instantaneous delivery. `drop`
// returns true for messages to lose. Sessions left unanswered time out.
// Returns the packets published by each node.
std::map<NodeId, std::vector<NegotiationPacket>> run_round(std::map<NodeId, Agent>& agents, Time now,
                                                           const std::function<bool(const Msg&)>& drop = {});

}  // namespace meshsim::negotiation
