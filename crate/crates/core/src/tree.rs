//! A game compiled into a flat array tree.
//!
//! Every solver traverses a [`Tree`] rather than the [`Game`] trait directly: children of
//! a node are contiguous, every child has a larger index than its parent, and each
//! decision node points at a dense per-player infoset index. Per-player action slots
//! (`offset + action`) give policies and regret tables a flat layout.

use std::collections::HashMap;

use crate::game_core::{Game, GameError, InfostateKey, NodeKind, PlayerId};

/// Default cap on compiled tree size.
pub const DEFAULT_MAX_NODES: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Terminal,
    Chance,
    Player1,
    Player2,
}

impl Tag {
    pub fn player(self) -> Option<usize> {
        match self {
            Tag::Player1 => Some(0),
            Tag::Player2 => Some(1),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub tag: Tag,
    /// Infoset index for decision nodes.
    pub infoset: u32,
    pub first_child: u32,
    pub num_children: u32,
    /// Player one's payoff at terminals.
    pub payoff: f64,
    /// Probability of the edge from a chance parent, `1.0` otherwise.
    pub prob: f64,
}

impl Node {
    #[inline]
    pub fn children(&self) -> std::ops::Range<usize> {
        let first = self.first_child as usize;
        first..first + self.num_children as usize
    }
}

/// The parent of an infostate: the player's previous decision `(infoset, local action)`.
pub type OwnParent = Option<(u32, u16)>;

#[derive(Debug, Clone)]
pub struct Infoset {
    pub key: InfostateKey,
    /// Offset of this infoset's first action slot in the player's slot array.
    pub offset: usize,
    /// Base-game action index of each local action.
    pub labels: Vec<u16>,
    pub parent: OwnParent,
    /// Index of the matching infoset in the unrestricted tree.
    pub base: u32,
    /// Decision nodes belonging to this infoset.
    pub nodes: Vec<u32>,
}

impl Infoset {
    #[inline]
    pub fn num_actions(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn slots(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.labels.len()
    }
}

#[derive(Debug, Clone)]
pub struct TerminalInfoset {
    pub key: InfostateKey,
    pub parent: OwnParent,
}

/// Exact history and infostate counts of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateCounts {
    pub histories: usize,
    pub decision_nodes: usize,
    pub chance_nodes: usize,
    pub terminals: usize,
    /// Decision infostates per player.
    pub infostates: [usize; 2],
    /// Infostates observed at terminal histories, per player.
    pub terminal_infostates: [usize; 2],
}

impl StateCounts {
    /// `|I_i|` counting both decision and terminal infostates.
    pub fn total_infostates(&self, player: usize) -> usize {
        self.infostates[player] + self.terminal_infostates[player]
    }
}

#[derive(Debug, Clone)]
pub struct Tree {
    name: String,
    nodes: Vec<Node>,
    infosets: [Vec<Infoset>; 2],
    terminal_infosets: [Vec<TerminalInfoset>; 2],
    key_index: [HashMap<InfostateKey, u32>; 2],
    slots: [usize; 2],
    /// Terminal infoset of each player, indexed by a terminal node's `infoset`.
    terminal_pairs: Vec<[u32; 2]>,
}

struct Builder<'g, G: Game> {
    game: &'g G,
    max_nodes: usize,
    tree: Tree,
    terminal_index: [HashMap<InfostateKey, u32>; 2],
}

impl<'g, G: Game> Builder<'g, G> {
    fn reserve(&mut self, count: usize) -> Result<u32, GameError> {
        let first = self.tree.nodes.len();
        if first + count > self.max_nodes {
            return Err(GameError::BudgetExceeded(self.max_nodes));
        }
        self.tree.nodes.extend((0..count).map(|_| Node {
            tag: Tag::Terminal,
            infoset: 0,
            first_child: 0,
            num_children: 0,
            payoff: 0.0,
            prob: 1.0,
        }));
        Ok(first as u32)
    }

    fn visit(
        &mut self,
        idx: usize,
        state: &G::State,
        own: [OwnParent; 2],
    ) -> Result<(), GameError> {
        match self.game.kind(state) {
            NodeKind::Terminal => {
                self.tree.nodes[idx].tag = Tag::Terminal;
                self.tree.nodes[idx].payoff = self.game.payoff(state);
                let mut pair = [0u32; 2];
                for (p, slot) in pair.iter_mut().enumerate() {
                    let key = self.game.infostate_key(state, PlayerId::from_index(p))?;
                    *slot = match self.terminal_index[p].get(&key) {
                        Some(&id) => id,
                        None => {
                            let id = self.tree.terminal_infosets[p].len() as u32;
                            self.terminal_index[p].insert(key.clone(), id);
                            self.tree.terminal_infosets[p].push(TerminalInfoset {
                                key,
                                parent: own[p],
                            });
                            id
                        }
                    };
                }
                self.tree.nodes[idx].infoset = self.tree.terminal_pairs.len() as u32;
                self.tree.terminal_pairs.push(pair);
                Ok(())
            }
            NodeKind::Chance => {
                let probs = self.game.chance_probs(state);
                let total: f64 = probs.iter().sum();
                if probs.is_empty()
                    || probs.iter().any(|&p| p <= 0.0)
                    || (total - 1.0).abs() > 1e-12
                {
                    return Err(GameError::InvalidConfig(format!(
                        "chance distribution must be positive and sum to 1 (got {total})"
                    )));
                }
                let first = self.reserve(probs.len())?;
                {
                    let n = &mut self.tree.nodes[idx];
                    n.tag = Tag::Chance;
                    n.first_child = first;
                    n.num_children = probs.len() as u32;
                }
                for (a, &p) in probs.iter().enumerate() {
                    let child = first as usize + a;
                    self.tree.nodes[child].prob = p;
                    let next = self.game.next(state, a.into());
                    self.visit(child, &next, own)?;
                }
                Ok(())
            }
            NodeKind::Decision(player) => {
                let p = player.index().ok_or(GameError::ChanceInfostate)?;
                let count = self.game.num_actions(state);
                if count == 0 {
                    return Err(GameError::InvalidConfig(
                        "decision node without actions".into(),
                    ));
                }
                let key = self.game.infostate_key(state, player)?;
                let infoset = match self.tree.key_index[p].get(&key) {
                    Some(&id) => {
                        let info = &self.tree.infosets[p][id as usize];
                        if info.num_actions() != count {
                            return Err(GameError::InvalidConfig(format!(
                                "infostate {key} has inconsistent action counts"
                            )));
                        }
                        if info.parent != own[p] {
                            return Err(GameError::InvalidConfig(format!(
                                "infostate {key} violates perfect recall"
                            )));
                        }
                        id
                    }
                    None => {
                        let id = self.tree.infosets[p].len() as u32;
                        self.tree.infosets[p].push(Infoset {
                            key: key.clone(),
                            offset: self.tree.slots[p],
                            labels: (0..count as u16).collect(),
                            parent: own[p],
                            base: id,
                            nodes: Vec::new(),
                        });
                        self.tree.slots[p] += count;
                        self.tree.key_index[p].insert(key, id);
                        id
                    }
                };
                self.tree.infosets[p][infoset as usize]
                    .nodes
                    .push(idx as u32);
                let first = self.reserve(count)?;
                {
                    let n = &mut self.tree.nodes[idx];
                    n.tag = if p == 0 { Tag::Player1 } else { Tag::Player2 };
                    n.infoset = infoset;
                    n.first_child = first;
                    n.num_children = count as u32;
                }
                for a in 0..count {
                    let next = self.game.next(state, a.into());
                    let mut child_own = own;
                    child_own[p] = Some((infoset, a as u16));
                    self.visit(first as usize + a, &next, child_own)?;
                }
                Ok(())
            }
        }
    }
}

impl Tree {
    /// Compiles `game` by exhaustive depth-first enumeration.
    ///
    /// Fails with [`GameError::BudgetExceeded`] past `max_nodes` histories, and with
    /// [`GameError::InvalidConfig`] when infostates disagree on their legal actions or
    /// violate perfect recall.
    pub fn build<G: Game>(game: &G, max_nodes: usize) -> Result<Tree, GameError> {
        let mut builder = Builder {
            game,
            max_nodes,
            tree: Tree {
                name: game.name(),
                nodes: Vec::new(),
                infosets: [Vec::new(), Vec::new()],
                terminal_infosets: [Vec::new(), Vec::new()],
                key_index: [HashMap::new(), HashMap::new()],
                slots: [0, 0],
                terminal_pairs: Vec::new(),
            },
            terminal_index: [HashMap::new(), HashMap::new()],
        };
        builder.reserve(1)?;
        builder.visit(0, &game.root(), [None, None])?;
        let mut tree = builder.tree;
        tree.nodes.shrink_to_fit();
        Ok(tree)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn infosets(&self, player: usize) -> &[Infoset] {
        &self.infosets[player]
    }

    #[inline]
    pub fn infoset(&self, player: usize, id: usize) -> &Infoset {
        &self.infosets[player][id]
    }

    pub fn terminal_infosets(&self, player: usize) -> &[TerminalInfoset] {
        &self.terminal_infosets[player]
    }

    /// Number of action slots of `player` (sum of action counts over infosets).
    #[inline]
    pub fn num_slots(&self, player: usize) -> usize {
        self.slots[player]
    }

    pub fn lookup(&self, key: &InfostateKey) -> Option<u32> {
        let p = key.player().index()?;
        self.key_index[p].get(key).copied()
    }

    pub fn counts(&self) -> StateCounts {
        let mut c = StateCounts {
            histories: self.nodes.len(),
            decision_nodes: 0,
            chance_nodes: 0,
            terminals: 0,
            infostates: [self.infosets[0].len(), self.infosets[1].len()],
            terminal_infostates: [
                self.terminal_infosets[0].len(),
                self.terminal_infosets[1].len(),
            ],
        };
        for n in &self.nodes {
            match n.tag {
                Tag::Terminal => c.terminals += 1,
                Tag::Chance => c.chance_nodes += 1,
                _ => c.decision_nodes += 1,
            }
        }
        c
    }

    /// Sub-tree keeping only `allowed[p][infoset]` (sorted local action indices) at
    /// every decision node. Infosets are re-indexed; `labels` and `base` still refer to
    /// the unrestricted game.
    ///
    /// Panics if an infoset reached by the restriction has an empty allowed set.
    pub fn restrict(&self, allowed: &[Vec<Vec<u16>>; 2]) -> Tree {
        let mut out = Tree {
            name: format!("restricted({})", self.name),
            nodes: Vec::new(),
            infosets: [Vec::new(), Vec::new()],
            terminal_infosets: [Vec::new(), Vec::new()],
            key_index: [HashMap::new(), HashMap::new()],
            slots: [0, 0],
            terminal_pairs: Vec::new(),
        };
        let mut terminal_map: [Vec<u32>; 2] = [
            vec![u32::MAX; self.terminal_infosets[0].len()],
            vec![u32::MAX; self.terminal_infosets[1].len()],
        ];
        let mut map: [Vec<u32>; 2] = [
            vec![u32::MAX; self.infosets[0].len()],
            vec![u32::MAX; self.infosets[1].len()],
        ];
        out.nodes.push(self.nodes[0]);
        // (source node, destination node); parents are always mapped before children
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        while let Some((src, dst)) = stack.pop() {
            let node = self.nodes[src];
            match node.tag {
                Tag::Terminal => {
                    let src_pair = self.terminal_pairs[node.infoset as usize];
                    let mut pair = [0u32; 2];
                    for p in 0..2 {
                        let t = src_pair[p] as usize;
                        if terminal_map[p][t] == u32::MAX {
                            terminal_map[p][t] = out.terminal_infosets[p].len() as u32;
                            let src = &self.terminal_infosets[p][t];
                            let parent = src.parent.map(|(pi, pa)| {
                                let local = allowed[p][pi as usize].iter().position(|&x| x == pa);
                                (
                                    map[p][pi as usize],
                                    local.expect("parent action allowed") as u16,
                                )
                            });
                            out.terminal_infosets[p].push(TerminalInfoset {
                                key: src.key.clone(),
                                parent,
                            });
                        }
                        pair[p] = terminal_map[p][t];
                    }
                    out.nodes[dst] = Node {
                        infoset: out.terminal_pairs.len() as u32,
                        first_child: 0,
                        num_children: 0,
                        ..node
                    };
                    out.terminal_pairs.push(pair);
                }
                Tag::Chance => {
                    let first = out.nodes.len();
                    out.nodes[dst] = Node {
                        first_child: first as u32,
                        ..node
                    };
                    for c in node.children() {
                        out.nodes.push(self.nodes[c]);
                    }
                    for (i, c) in node.children().enumerate() {
                        stack.push((c, first + i));
                    }
                }
                Tag::Player1 | Tag::Player2 => {
                    let p = node.tag.player().unwrap();
                    let src_info = &self.infosets[p][node.infoset as usize];
                    let acts = &allowed[p][node.infoset as usize];
                    assert!(!acts.is_empty(), "empty allowed set at {}", src_info.key);
                    let id = if map[p][node.infoset as usize] == u32::MAX {
                        let id = out.infosets[p].len() as u32;
                        let parent = src_info.parent.map(|(pi, pa)| {
                            let mapped = map[p][pi as usize];
                            let local = allowed[p][pi as usize]
                                .iter()
                                .position(|&x| x == pa)
                                .expect("parent action allowed");
                            (mapped, local as u16)
                        });
                        out.infosets[p].push(Infoset {
                            key: src_info.key.clone(),
                            offset: out.slots[p],
                            labels: acts.iter().map(|&a| src_info.labels[a as usize]).collect(),
                            parent,
                            base: src_info.base,
                            nodes: Vec::new(),
                        });
                        out.slots[p] += acts.len();
                        out.key_index[p].insert(src_info.key.clone(), id);
                        map[p][node.infoset as usize] = id;
                        id
                    } else {
                        map[p][node.infoset as usize]
                    };
                    out.infosets[p][id as usize].nodes.push(dst as u32);
                    let first = out.nodes.len();
                    out.nodes[dst] = Node {
                        infoset: id,
                        first_child: first as u32,
                        num_children: acts.len() as u32,
                        ..node
                    };
                    for &a in acts {
                        out.nodes
                            .push(self.nodes[node.first_child as usize + a as usize]);
                    }
                    for (i, &a) in acts.iter().enumerate() {
                        stack.push((node.first_child as usize + a as usize, first + i));
                    }
                }
            }
        }
        out
    }
}
