"""Domain model for driver scheduling instances.

Vehicle work is given as blocks, each an ordered list of relief
opportunities (ROs). The work between two consecutive ROs on one block is
a piece of work; pieces are always derived, never read from input.
All times are integer minutes from midnight.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path


class ValidationError(ValueError):
    """Raised when an instance violates a structural invariant."""


@dataclass(frozen=True)
class ReliefOpportunity:
    time: int
    location: str = ""


@dataclass(frozen=True)
class Block:
    id: str
    relief_opportunities: tuple[ReliefOpportunity, ...]

    @property
    def times(self) -> list[int]:
        return [ro.time for ro in self.relief_opportunities]


@dataclass(frozen=True)
class PieceOfWork:
    block_id: str
    index_in_block: int
    start_min: int
    end_min: int
    piece_id: int

    @property
    def work_time(self) -> int:
        return self.end_min - self.start_min


@dataclass(frozen=True)
class Rules:
    """Legality rules for a shift.

    Ratio bounds are integer percentages of work time over spreadover,
    so ``min_ratio=60`` means at least 60% of paid time is driving.
    """

    min_work_time: int = 240
    max_work_time: int = 540
    min_ratio: int = 50
    max_ratio: int = 100
    max_spells: int = 4
    max_spreadover: int = 720
    min_break_between_spells: int = 30
    signon_allowance: int = 0
    signoff_allowance: int = 0

    def problems(self) -> list[str]:
        out = []
        if self.min_work_time >= self.max_work_time:
            out.append("rules: min_work_time must be below max_work_time")
        if self.min_ratio >= self.max_ratio:
            out.append("rules: min_ratio must be below max_ratio")
        if self.min_ratio < 0 or self.max_ratio > 100:
            out.append("rules: ratio bounds must lie in 0..100")
        if self.max_spells < 1:
            out.append("rules: max_spells must be at least 1")
        if self.max_spreadover <= 0:
            out.append("rules: max_spreadover must be positive")
        for name in ("min_break_between_spells", "signon_allowance", "signoff_allowance"):
            if getattr(self, name) < 0:
                out.append(f"rules: {name} must be non-negative")
        return out


@dataclass(frozen=True)
class Spell:
    block_id: str
    first_piece: int
    last_piece: int


@dataclass(frozen=True)
class Shift:
    """One driver's work: time-ordered spells plus derived measures.

    Build through :func:`make_shift` so the derived fields stay consistent.
    """

    spells: tuple[Spell, ...]
    pieces: tuple[int, ...]
    work_time: int
    spreadover: int
    start_min: int
    end_min: int

    @property
    def cost(self) -> int:
        return self.spreadover

    @property
    def ratio(self) -> float:
        return self.work_time / self.spreadover

    @property
    def n_pieces(self) -> int:
        return len(self.pieces)

    @property
    def n_spells(self) -> int:
        return len(self.spells)

    def spell_string(self) -> str:
        return " ".join(f"{s.block_id}:{s.first_piece}-{s.last_piece}" for s in self.spells)


@dataclass(frozen=True)
class Instance:
    name: str
    blocks: tuple[Block, ...]
    rules: Rules = field(default_factory=Rules)

    def __post_init__(self):
        object.__setattr__(self, "_pieces", None)
        object.__setattr__(self, "_index", None)

    @classmethod
    def from_times(cls, name: str, blocks: dict, rules: Rules | None = None) -> "Instance":
        """Shorthand: ``{"A": [0, 60, 120], ...}`` maps block ids to RO times."""
        return cls(
            name,
            tuple(Block(bid, tuple(ReliefOpportunity(int(t)) for t in times))
                  for bid, times in blocks.items()),
            rules or Rules(),
        )

    @property
    def pieces(self) -> list[PieceOfWork]:
        if self._pieces is None:
            object.__setattr__(self, "_pieces", derive_pieces(self))
        return self._pieces

    @property
    def n_pieces(self) -> int:
        return len(self.pieces)

    def piece_at(self, block_id: str, index_in_block: int) -> PieceOfWork:
        if self._index is None:
            idx = {(p.block_id, p.index_in_block): p for p in self.pieces}
            object.__setattr__(self, "_index", idx)
        return self._index[(block_id, index_in_block)]

    def block(self, block_id: str) -> Block:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise KeyError(block_id)

    def total_work(self) -> int:
        return sum(b.times[-1] - b.times[0] for b in self.blocks if len(b.times) >= 2)


def derive_pieces(instance: Instance) -> list[PieceOfWork]:
    """Split every block into pieces between consecutive relief opportunities.

    Piece ids are dense and run block by block, then by position in block.
    """
    pieces = []
    for block in instance.blocks:
        times = block.times
        if len(times) < 2:
            raise ValidationError(f"block {block.id!r} has no pieces (needs at least two ROs)")
        for i in range(len(times) - 1):
            if times[i + 1] <= times[i]:
                raise ValidationError(
                    f"block {block.id!r}: RO times not strictly increasing at index {i + 1}"
                )
            pieces.append(PieceOfWork(block.id, i, times[i], times[i + 1], len(pieces)))
    return pieces


def validate_instance(instance: Instance) -> list[str]:
    """Return every problem found in ``instance``; an empty list means valid."""
    report = list(instance.rules.problems())
    if not instance.blocks:
        report.append("instance has no blocks")
    seen = set()
    for block in instance.blocks:
        if block.id in seen:
            report.append(f"block {block.id!r}: duplicate block id")
        seen.add(block.id)
        times = block.times
        if len(times) < 2:
            report.append(f"block {block.id!r}: block has no pieces")
            continue
        if times[0] < 0:
            report.append(f"block {block.id!r}: negative RO time")
        for i in range(1, len(times)):
            if times[i] <= times[i - 1]:
                report.append(f"block {block.id!r}: RO times not strictly increasing at index {i}")
    return report


def make_shift(instance: Instance, spells) -> Shift:
    rules = instance.rules
    spells = tuple(spells)
    pieces = []
    work = 0
    for sp in spells:
        for i in range(sp.first_piece, sp.last_piece + 1):
            piece = instance.piece_at(sp.block_id, i)
            pieces.append(piece.piece_id)
            work += piece.work_time
    first = instance.piece_at(spells[0].block_id, spells[0].first_piece)
    last = instance.piece_at(spells[-1].block_id, spells[-1].last_piece)
    spread = (last.end_min + rules.signoff_allowance) - (first.start_min - rules.signon_allowance)
    return Shift(
        spells=spells,
        pieces=tuple(sorted(pieces)),
        work_time=work,
        spreadover=spread,
        start_min=first.start_min,
        end_min=last.end_min,
    )


def shift_violations(instance: Instance, shift: Shift) -> list[str]:
    """Rule violations of ``shift``; used to re-check generated pools."""
    r = instance.rules
    out = []
    if not 1 <= shift.n_spells <= r.max_spells:
        out.append(f"{shift.n_spells} spells")
    if not r.min_work_time <= shift.work_time <= r.max_work_time:
        out.append(f"work time {shift.work_time}")
    if shift.spreadover > r.max_spreadover:
        out.append(f"spreadover {shift.spreadover}")
    if not r.min_ratio * shift.spreadover <= 100 * shift.work_time <= r.max_ratio * shift.spreadover:
        out.append(f"ratio {shift.ratio:.3f}")
    if len(set(shift.pieces)) != len(shift.pieces):
        out.append("duplicate pieces")
    for prev, nxt in zip(shift.spells, shift.spells[1:]):
        prev_end = instance.piece_at(prev.block_id, prev.last_piece).end_min
        next_start = instance.piece_at(nxt.block_id, nxt.first_piece).start_min
        if next_start < prev_end + r.min_break_between_spells:
            out.append("break too short")
        if prev.block_id == nxt.block_id and nxt.first_piece == prev.last_piece + 1:
            out.append("adjacent spells on one block")
    return out


# -- JSON instance files ------------------------------------------------------

def instance_to_dict(instance: Instance) -> dict:
    return {
        "name": instance.name,
        "rules": asdict(instance.rules),
        "blocks": [
            {
                "id": b.id,
                "relief_opportunities": [
                    {"time_min": ro.time, "location": ro.location} for ro in b.relief_opportunities
                ],
            }
            for b in instance.blocks
        ],
    }


def instance_from_dict(data: dict) -> Instance:
    rules = Rules(**{k: int(v) for k, v in data.get("rules", {}).items()})
    blocks = tuple(
        Block(
            id=str(b["id"]),
            relief_opportunities=tuple(
                ReliefOpportunity(int(ro["time_min"]), str(ro.get("location", "")))
                for ro in b["relief_opportunities"]
            ),
        )
        for b in data["blocks"]
    )
    return Instance(name=str(data["name"]), blocks=blocks, rules=rules)


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(dumps_instance(instance))


def load_instance(path) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text()))
