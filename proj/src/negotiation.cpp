#include "meshsim/negotiation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace meshsim::negotiation {

QualityList::QualityList(Band band) : band_(band), dbm_(band_channels(band).size(), kFloorDbm) {}

void QualityList::set_index(std::size_t i, double dbm) {
    if (i >= dbm_.size()) throw DomainError("quality index out of range");
    dbm_[i] = std::clamp(dbm, kFloorDbm, 0.0);
}

double QualityList::at_channel(int channel) const { return dbm_[channel_index(band_, channel)]; }

void QualityList::set_channel(int channel, double dbm) { set_index(channel_index(band_, channel), dbm); }

std::size_t channel_index(Band band, int channel) {
    auto list = band_channels(band);
    auto it = std::find(list.begin(), list.end(), channel);
    if (it == list.end())
        throw DomainError("channel " + std::to_string(channel) + " is not part of band " + to_string(band));
    return static_cast<std::size_t>(it - list.begin());
}

void Params::validate() const {
    if (window_halfwidth < 0) throw DomainError("window_halfwidth must be >= 0");
    if (switch_threshold_dbm < 0.0) throw DomainError("switch_threshold_dbm must be >= 0");
    if (!(refresh_weight >= 0.0 && refresh_weight <= 1.0)) throw DomainError("refresh_weight must lie in [0,1]");
    if (!(round_period_s > 0.0)) throw DomainError("round_period_s must be > 0");
    if (first_round_s < 0.0) throw DomainError("first_round_s must be >= 0");
    if (!(timeout_s > 0.0)) throw DomainError("timeout_s must be > 0");
    if (separacio < 0) throw DomainError("separacio must be >= 0");
}

QualityList merge_quality(const QualityList& a, const QualityList& b) {
    if (a.band() != b.band() || a.size() != b.size())
        throw DomainError("merge_quality: lists cover different channel sets");
    QualityList out(a.band());
    for (std::size_t i = 0; i < a.size(); ++i) out.set_index(i, std::max(a.at_index(i), b.at_index(i)));
    return out;
}

double window_score(const QualityList& q, int channel, int halfwidth) {
    long i = static_cast<long>(channel_index(q.band(), channel));
    long lo = std::max(0L, i - halfwidth);
    long hi = std::min(static_cast<long>(q.size()) - 1, i + halfwidth);
    double worst = kFloorDbm;
    for (long k = lo; k <= hi; ++k) worst = std::max(worst, q.at_index(static_cast<std::size_t>(k)));
    return worst;
}

int select_channel(const QualityList& q, const Params& params) {
    std::vector<int> candidates;
    if (params.separacio > 0) {
        auto list = band_channels(q.band());
        for (std::size_t i = 0; i < list.size(); i += static_cast<std::size_t>(params.separacio))
            if (std::find(params.allowed_channels.begin(), params.allowed_channels.end(), list[i]) !=
                params.allowed_channels.end())
                candidates.push_back(list[i]);
    } else {
        candidates = params.allowed_channels;
    }
    if (candidates.empty()) throw DomainError("select_channel: no candidate channel");

    int best = candidates.front();
    double best_score = window_score(q, best, params.window_halfwidth);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        double s = window_score(q, candidates[i], params.window_halfwidth);
        if (s < best_score) {
            best = candidates[i];
            best_score = s;
        }
    }
    return best;
}

Decision decide_switch(int current, int proposed, double q_current, double q_proposed, const Params& params) {
    if (proposed == current || proposed == 0) return Decision::Keep;
    return q_current - q_proposed >= params.switch_threshold_dbm ? Decision::Switch : Decision::Keep;
}

QualityList ponderate_quality(const QualityList& q_new, const QualityList& q_old, double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("refresh weight must lie in [0,1]");
    if (q_new.band() != q_old.band()) throw DomainError("ponderate_quality: lists cover different bands");
    QualityList out(q_new.band());
    for (std::size_t i = 0; i < q_new.size(); ++i)
        out.set_index(i, w * q_new.at_index(i) + (1.0 - w) * q_old.at_index(i));
    return out;
}

std::map<Edge, Channel> initial_assignment(const Topology& topo, Band band, const std::vector<int>& allowed,
                                           const std::function<bool(const Edge&, int)>& usable) {
    if (allowed.empty()) throw DomainError("initial_assignment: no allowed channel");
    std::vector<int> sorted = allowed;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<Channel> channels;
    for (int c : sorted) channels.push_back(Channel::make(band, c));

    std::map<Edge, Channel> out;
    std::map<NodeId, std::map<int, int>> usage;  // node -> channel -> incident links
    for (const auto& e : topo.adjacency()) {
        const Channel* best = nullptr;
        int best_use = 0;
        for (const auto& c : channels) {
            if (usable && !usable(e, c.index)) continue;
            int use = usage[e.a][c.index] + usage[e.b][c.index];
            if (!best || use < best_use) {
                best = &c;
                best_use = use;
            }
        }
        if (!best) continue;
        out[e] = *best;
        ++usage[e.a][best->index];
        ++usage[e.b][best->index];
    }
    return out;
}

bool Interferer::audible_at(const Node& n) const {
    if (std::find(nodes.begin(), nodes.end(), n.id) != nodes.end()) return true;
    if (center) {
        double dx = n.position.x - center->x;
        double dy = n.position.y - center->y;
        return std::sqrt(dx * dx + dy * dy) <= radius_m;
    }
    return false;
}

QualityList default_scan(const Topology& topo, const std::vector<Interferer>& interferers, NodeId node,
                         Time now, Band band) {
    QualityList q(band);
    const Node& n = topo.node(node);
    for (const auto& i : interferers) {
        if (i.channel.band != band || !i.active(now) || !i.audible_at(n)) continue;
        q.set_channel(i.channel.index, std::max(q.at_channel(i.channel.index), i.level_dbm));
    }
    return q;
}

std::string to_string(MsgKind k) {
    switch (k) {
        case MsgKind::MacRequest: return "mac_request";
        case MsgKind::MacReply: return "mac_reply";
        case MsgKind::QualityReport: return "quality_report";
        case MsgKind::ChannelProposal: return "channel_proposal";
        case MsgKind::DecisionNotice: return "decision_notice";
    }
    return "?";
}

void Outbox::append(Outbox&& o) {
    for (auto& m : o.messages) messages.push_back(std::move(m));
    for (auto& p : o.published) published.push_back(std::move(p));
    for (auto& t : o.timers) timers.push_back(t);
}

Agent::Agent(NodeId self, Band band, std::vector<int> allowed, std::string own_mac, Params params,
             ScanProvider scan)
    : self_(self), band_(band), allowed_(std::move(allowed)), own_mac_(std::move(own_mac)),
      params_(std::move(params)), scan_(std::move(scan)) {
    params_.validate();
    if (allowed_.empty()) throw DomainError("negotiation agent needs at least one allowed channel");
    for (int c : allowed_) channel_index(band_, c);
}

void Agent::add_peer(NodeId peer, Address peer_bond_ip, int initial_channel) {
    Peer p;
    p.bond_ip = peer_bond_ip;
    p.channel = initial_channel;
    peers_[peer] = std::move(p);
}

std::vector<NodeId> Agent::peers() const {
    std::vector<NodeId> out;
    for (const auto& [id, p] : peers_) out.push_back(id);
    return out;
}

int Agent::link_channel(NodeId peer) const {
    auto it = peers_.find(peer);
    return it == peers_.end() ? 0 : it->second.channel;
}

std::optional<std::string> Agent::peer_mac(NodeId peer) const {
    auto it = peers_.find(peer);
    if (it == peers_.end()) return std::nullopt;
    return it->second.mac;
}

Msg Agent::to_peer(NodeId peer, MsgKind kind) const {
    Msg m;
    m.kind = kind;
    m.from = self_;
    m.to = peer;
    return m;
}

Outbox Agent::send_report(NodeId peer, Peer& p, Time now) {
    Outbox out;
    Msg m = to_peer(peer, MsgKind::QualityReport);
    m.round = p.round;
    m.quality = scan_(self_, now);
    m.allowed = allowed_;
    m.current_channel = p.channel;
    p.stage = Stage::AwaitProposal;
    out.messages.push_back(std::move(m));
    return out;
}

Outbox Agent::publish(Peer& p, int channel, int previous) {
    Outbox out;
    out.published.push_back({p.bond_ip, p.mac.value_or(""), channel, previous});
    return out;
}

Outbox Agent::start_round(Time now) {
    Outbox out;
    ++stats_.rounds;
    for (auto& [id, p] : peers_) {
        ++p.round;
        out.timers.push_back({id, p.round});
        if (!p.mac) {
            Msg m = to_peer(id, MsgKind::MacRequest);
            m.round = p.round;
            m.mac = own_mac_;
            p.stage = Stage::AwaitMac;
            out.messages.push_back(std::move(m));
        } else {
            out.append(send_report(id, p, now));
        }
    }
    stats_.messages_sent += out.messages.size();
    return out;
}

Outbox Agent::on_message(const Msg& m, Time now) {
    Outbox out;
    auto it = peers_.find(m.from);
    if (it == peers_.end() || m.to != self_) return out;
    Peer& p = it->second;

    switch (m.kind) {
        case MsgKind::MacRequest: {
            p.mac = m.mac;
            Msg r = to_peer(m.from, MsgKind::MacReply);
            r.round = m.round;
            r.mac = own_mac_;
            out.messages.push_back(std::move(r));
            break;
        }
        case MsgKind::MacReply:
            p.mac = m.mac;
            if (p.stage == Stage::AwaitMac && m.round == p.round) out.append(send_report(m.from, p, now));
            break;
        case MsgKind::QualityReport: {
            if (!m.quality) break;
            QualityList merged = merge_quality(*m.quality, scan_(self_, now));
            if (params_.refresh_weight > 0.0 && p.history)
                merged = ponderate_quality(merged, *p.history, params_.refresh_weight);
            p.history = merged;

            Params sel = params_;
            sel.allowed_channels.clear();
            for (int c : m.allowed)
                if (std::find(allowed_.begin(), allowed_.end(), c) != allowed_.end())
                    sel.allowed_channels.push_back(c);
            Msg r = to_peer(m.from, MsgKind::ChannelProposal);
            r.round = m.round;
            r.current_channel = m.current_channel;
            if (!sel.allowed_channels.empty()) {
                r.channel = select_channel(merged, sel);
                r.score_proposed = window_score(merged, r.channel, params_.window_halfwidth);
                r.score_current = m.current_channel ? window_score(merged, m.current_channel, params_.window_halfwidth)
                                                    : r.score_proposed;
            }
            out.messages.push_back(std::move(r));
            break;
        }
        case MsgKind::ChannelProposal: {
            if (p.stage != Stage::AwaitProposal || m.round != p.round) break;
            p.stage = Stage::Idle;
            int previous = p.channel;
            if (decide_switch(p.channel, m.channel, m.score_current, m.score_proposed, params_) ==
                Decision::Switch) {
                p.channel = m.channel;
                ++stats_.switches;
            }
            out.append(publish(p, p.channel, previous));
            Msg n = to_peer(m.from, MsgKind::DecisionNotice);
            n.round = m.round;
            n.channel = p.channel;
            n.current_channel = previous;
            out.messages.push_back(std::move(n));
            break;
        }
        case MsgKind::DecisionNotice: {
            if (m.channel == 0) break;
            int previous = p.channel;
            p.channel = m.channel;
            out.append(publish(p, p.channel, previous));
            break;
        }
    }
    stats_.messages_sent += out.messages.size();
    return out;
}

Outbox Agent::on_timeout(const RoundTimer& t, Time) {
    Outbox out;
    auto it = peers_.find(t.peer);
    if (it == peers_.end()) return out;
    Peer& p = it->second;
    if (p.round != t.round || p.stage == Stage::Idle) return out;
    p.stage = Stage::Idle;
    ++stats_.timeouts;
    out.append(publish(p, 0, p.channel));
    return out;
}

std::map<NodeId, std::vector<NegotiationPacket>> run_round(std::map<NodeId, Agent>& agents, Time now,
                                                           const std::function<bool(const Msg&)>& drop) {
    std::map<NodeId, std::vector<NegotiationPacket>> published;
    std::deque<Msg> queue;
    std::vector<std::pair<NodeId, RoundTimer>> timers;

    auto absorb = [&](NodeId who, Outbox&& o) {
        for (auto& m : o.messages)
            if (!drop || !drop(m)) queue.push_back(std::move(m));
        for (auto& p : o.published) published[who].push_back(std::move(p));
        for (auto& t : o.timers) timers.emplace_back(who, t);
    };

    for (auto& [id, a] : agents) absorb(id, a.start_round(now));
    while (!queue.empty()) {
        Msg m = std::move(queue.front());
        queue.pop_front();
        auto it = agents.find(m.to);
        if (it == agents.end()) continue;
        absorb(m.to, it->second.on_message(m, now));
    }
    for (const auto& [who, t] : timers) absorb(who, agents.at(who).on_timeout(t, now));
    return published;
}

}  // namespace meshsim::negotiation
