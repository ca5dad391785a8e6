"""HTTP service exposing encode, decode, validate, and version.

The endpoints wrap the same library calls the CLI uses, so any client that
serializes the responses the same way gets byte-identical results. Score
matrices cross the boundary as plain row-major nested lists plus an
optional label set that fixes the terminal column order.
"""

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

import numpy as np

from hexaparse import __version__
from hexaparse.bht import BinarizationOrder
from hexaparse.codec import (
    TagVocab,
    ValidityState,
    parse_tag,
    serialize_tag,
    step_validity,
    tags_to_tree,
    tree_to_tags,
)
from hexaparse.decoder import ScoreTable, viterbi_decode
from hexaparse.errors import (
    DecodeError,
    InvalidTransitionError,
    NonProjectiveError,
    ShapeError,
    TreeStructureError,
    UnknownTagError,
)
from hexaparse.treebank import DepTree

app = FastAPI(title="hexaparse", version=__version__)


class EncodeRequest(BaseModel):
    heads: list[int] = Field(min_length=1)
    deprels: list[str] | None = None
    order: str = "left"
    labeled: bool = False


class EncodeResponse(BaseModel):
    tags: list[str]


class DecodeRequest(BaseModel):
    terminal_scores: list[list[float]] = Field(min_length=1)
    nonterminal_scores: list[list[float]]
    tokens: list[str] | None = None
    labels: list[str] | None = None
    max_depth: int | None = None


class DecodeResponse(BaseModel):
    heads: list[int]
    deprels: list[str]
    tags: list[str]
    log_score: float


class ValidateRequest(BaseModel):
    tags: list[str] = Field(min_length=1)
    max_depth: int | None = None


class ValidateResponse(BaseModel):
    valid: bool
    reason: str | None = None
    depth_profile: list[int] | None = None


@app.get("/version")
def version() -> dict:
    return {"name": "hexaparse", "version": __version__}


@app.post("/encode", response_model=EncodeResponse)
def encode(req: EncodeRequest) -> EncodeResponse:
    try:
        tree = DepTree.from_heads(req.heads, deprels=req.deprels)
        seq = tree_to_tags(tree, BinarizationOrder(req.order), labeled=req.labeled)
    except NonProjectiveError as exc:
        raise HTTPException(
            status_code=422,
            detail={"message": str(exc), "crossing_arcs": exc.arcs},
        ) from None
    except (TreeStructureError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return EncodeResponse(tags=[serialize_tag(t) for t in seq])


@app.post("/decode", response_model=DecodeResponse)
def decode(req: DecodeRequest) -> DecodeResponse:
    try:
        vocab = TagVocab.labeled(req.labels) if req.labels else TagVocab.unlabeled()
        nt = (
            np.asarray(req.nonterminal_scores, dtype=np.float64)
            if req.nonterminal_scores
            else np.zeros((0, 4))
        )
        table = ScoreTable(np.asarray(req.terminal_scores, dtype=np.float64), nt, vocab)
        if req.tokens is not None and len(req.tokens) != table.n:
            raise ShapeError(
                f"{len(req.tokens)} tokens do not match {table.n} terminal score rows"
            )
        result = viterbi_decode(table, max_depth=req.max_depth)
        tree = tags_to_tree(result.tags, forms=req.tokens)
    except (ShapeError, DecodeError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return DecodeResponse(
        heads=tree.heads,
        deprels=tree.deprels,
        tags=[serialize_tag(t) for t in result.tags],
        log_score=result.log_score,
    )


@app.post("/validate", response_model=ValidateResponse)
def validate(req: ValidateRequest) -> ValidateResponse:
    try:
        tags = [parse_tag(token) for token in req.tags]
    except UnknownTagError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    state = ValidityState()
    profile = []
    try:
        for tag in tags:
            state = step_validity(state, tag, req.max_depth)
            profile.append(state.depth)
    except InvalidTransitionError as exc:
        return ValidateResponse(valid=False, reason=str(exc), depth_profile=profile or None)
    if state.depth != 1:
        return ValidateResponse(
            valid=False,
            reason=f"sequence leaves {state.depth} stack elements, expected exactly 1",
            depth_profile=profile,
        )
    return ValidateResponse(valid=True, depth_profile=profile)
