# *****************************************************************************
# *
# * Authors:     The scipion-bayesrisk contributors
# *
# * This program is free software; you can redistribute it and/or modify
# * it under the terms of the GNU General Public License as published by
# * the Free Software Foundation; either version 3 of the License, or
# * (at your option) any later version.
# *
# * This program is distributed in the hope that it will be useful,
# * but WITHOUT ANY WARRANTY; without even the implied warranty of
# * MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# * GNU General Public License for more details.
# *
# * You should have received a copy of the GNU General Public License
# * along with this program; if not, write to the Free Software
# * Foundation, Inc., 59 Temple Place, Suite 330, Boston, MA
# * 02111-1307  USA
# *
# *****************************************************************************
"""
Streaming fraud scoring.

Records arrive as one JSON object per line, {"id", "ts", "x", "y"?}, and
leave as one JSON event per line, {"id", "score", "flag", "version",
"lat_us"}, in input order. Labelled records are buffered; every batchSize of
them the posterior is refit in the background and swapped in between two
records, which bumps the version.
"""
import json
import logging
import math
import queue
import socket
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constants import STREAM_BATCH, STREAM_QUEUE
from .errors import (MalformedLine, BayesRiskError, VersionUpdateFailed,
                     InvalidParameter)
from .fraud import (assertTrainScope, buildFraudFeatures, predictProba,
                    sequentialUpdate)

logger = logging.getLogger(__name__)

_END = object()


@dataclass(frozen=True)
class StreamRecord:
    recordId: object
    ts: float
    x: np.ndarray
    y: int = None

    @classmethod
    def parse(cls, line):
        """ Parse one input line, MalformedLine on anything unexpected. """
        try:
            doc = json.loads(line)
        except ValueError as e:
            raise MalformedLine("Not JSON: %s" % e)
        if not isinstance(doc, dict):
            raise MalformedLine("Expected a JSON object")
        missing = [k for k in ('id', 'ts', 'x') if k not in doc]
        if missing:
            raise MalformedLine("Missing keys %s" % missing)
        try:
            ts = float(doc['ts'])
            x = np.asarray(doc['x'], dtype=float)
        except (TypeError, ValueError) as e:
            raise MalformedLine("Bad ts or x: %s" % e)
        if x.ndim != 1 or not np.all(np.isfinite(x)) or not math.isfinite(ts):
            raise MalformedLine("x must be a flat list of finite numbers")
        y = doc.get('y')
        if y is not None and y not in (0, 1):
            raise MalformedLine("y must be 0, 1 or absent, got %r" % (y,))
        return cls(doc['id'], ts, x, y)


@dataclass(frozen=True)
class ScoreEvent:
    recordId: object
    score: float
    flag: bool
    version: int
    latUs: float

    def toLine(self):
        return json.dumps({'id': self.recordId, 'score': self.score,
                           'flag': self.flag, 'version': self.version,
                           'lat_us': round(self.latUs, 1)})

    @classmethod
    def fromLine(cls, line):
        doc = json.loads(line)
        return cls(doc['id'], doc['score'], doc['flag'], doc['version'],
                   doc['lat_us'])


@dataclass
class StreamSummary:
    processed: int = 0
    malformed: int = 0
    labelled: int = 0
    updates: int = 0
    failedUpdates: int = 0
    version: int = 1
    p50Us: float = float('nan')
    p99Us: float = float('nan')
    recordsPerSecond: float = float('nan')
    errors: list = field(default_factory=list)

    @property
    def updateFailed(self):
        return self.failedUpdates > 0

    def toDict(self):
        return {'processed': self.processed, 'malformed': self.malformed,
                'labelled': self.labelled, 'updates': self.updates,
                'failed_updates': self.failedUpdates,
                'update_failed': self.updateFailed,
                'version': self.version, 'p50_us': self.p50Us,
                'p99_us': self.p99Us,
                'records_per_second': self.recordsPerSecond}


class FraudScorer:
    """ Current posterior and policy. The pair is replaced as a whole, so a
    score never mixes two versions. """

    def __init__(self, posterior, policy, version=1):
        if posterior.draws is None:
            raise InvalidParameter("Streaming needs a posterior with draws")
        if posterior.standardizer is not None:
            assertTrainScope(posterior.standardizer)
        self._current = (posterior, version)
        self.policy = policy

    @property
    def posterior(self):
        return self._current[0]

    @property
    def version(self):
        return self._current[1]

    def swap(self, posterior):
        self._current = (posterior, self._current[1] + 1)
        logger.info("Posterior version %d in service (%d observations)",
                    self._current[1], posterior.nObs)

    def features(self, record, posterior):
        std = posterior.standardizer
        if std is not None:
            return std.transform(record.x)
        if len(record.x) != posterior.dim - 1:
            raise MalformedLine("Record %s has %d features, posterior has %d"
                                % (record.recordId, len(record.x),
                                   posterior.dim - 1))
        return record.x

    def score(self, record, intake):
        posterior, version = self._current
        x = self.features(record, posterior)
        score = predictProba(posterior, x)
        return x, ScoreEvent(record.recordId, score, self.policy.flag(score),
                             version, (time.perf_counter() - intake) * 1e6)


def _readLines(source, lines, stop):
    try:
        for line in source:
            if stop.is_set():
                break
            lines.put((line, time.perf_counter()))
    finally:
        lines.put((_END, None))


def serve(source, sink, posterior, policy, batchSize=STREAM_BATCH,
          deterministic=False, seed=None, queueSize=STREAM_QUEUE,
          countQueueWait=True):
    """ This method scores every well formed line of source and writes one
    event per line to sink, in order.

    A reader thread feeds a bounded queue, the calling thread scores, and a
    single background worker computes posterior updates. In deterministic
    mode the swap happens right after the record that completed the batch;
    otherwise scoring continues on the old version until the update is
    ready. A partial batch left at the end of input is absorbed too. Blank
    lines count as malformed, so every input line is either an event or a
    skip.

    Latency runs from the moment the reader took the line, or from the
    moment the scorer dequeued it when countQueueWait is False (an unpaced
    replay reads the whole file ahead).

    :returns: StreamSummary
    """
    if batchSize < 1:
        raise InvalidParameter("batchSize must be >= 1")
    scorer = FraudScorer(posterior, policy)
    summary = StreamSummary()
    lines = queue.Queue(maxsize=queueSize)
    stop = threading.Event()
    reader = threading.Thread(target=_readLines, args=(source, lines, stop),
                              daemon=True)
    updater = ThreadPoolExecutor(max_workers=1)
    pendingX, pendingY = [], []
    inFlight = None
    latencies = []
    lastTs = -math.inf

    def submit():
        nonlocal inFlight
        wait()
        X, y = np.array(pendingX), np.array(pendingY)
        pendingX.clear()
        pendingY.clear()
        inFlight = updater.submit(sequentialUpdate, scorer.posterior, X, y, seed)

    def wait():
        nonlocal inFlight
        if inFlight is None:
            return
        future, inFlight = inFlight, None
        try:
            scorer.swap(future.result())
            summary.updates += 1
        except BayesRiskError as e:
            error = VersionUpdateFailed("Update to version %d failed: %s"
                                        % (scorer.version + 1, e))
            logger.error("%s, scoring continues on version %d", error,
                         scorer.version)
            summary.failedUpdates += 1
            summary.errors.append(str(error))

    started = time.perf_counter()
    reader.start()
    try:
        while True:
            line, intake = lines.get()
            if line is _END:
                break
            if not countQueueWait:
                intake = time.perf_counter()
            if not line.strip():
                summary.malformed += 1
                logger.debug("Skipping blank line")
                continue
            if inFlight is not None and inFlight.done():
                wait()
            try:
                record = StreamRecord.parse(line)
                if record.ts < lastTs:
                    raise MalformedLine("Timestamp %s goes back from %s"
                                        % (record.ts, lastTs))
                x, event = scorer.score(record, intake)
            except (MalformedLine, ValueError) as e:
                summary.malformed += 1
                logger.warning("Skipping malformed line: %s", e)
                continue
            lastTs = record.ts
            sink.write(event.toLine() + '\n')
            sink.flush()
            latencies.append((time.perf_counter() - intake) * 1e6)
            summary.processed += 1

            if record.y is not None:
                summary.labelled += 1
                pendingX.append(x)
                pendingY.append(record.y)
                if len(pendingY) >= batchSize:
                    submit()
                    if deterministic:
                        wait()
    except KeyboardInterrupt:
        logger.info("Interrupted, finishing the pending update")
        stop.set()
    finally:
        if pendingY:
            submit()
        wait()
        updater.shutdown()

    elapsed = time.perf_counter() - started
    summary.version = scorer.version
    if latencies:
        summary.p50Us, summary.p99Us = (float(v) for v in
                                         np.percentile(latencies, [50, 99]))
        summary.recordsPerSecond = summary.processed / elapsed if elapsed > 0 \
            else float('inf')
    logger.info("Stream done: %d scored, %d malformed, version %d, p99 %.1f us",
                summary.processed, summary.malformed, summary.version,
                summary.p99Us)
    return summary


def _paced(lines, speedup):
    """ Yield lines with the gaps of their ts values divided by speedup. """
    previous = None
    for line in lines:
        try:
            ts = float(json.loads(line)['ts'])
        except (ValueError, KeyError, TypeError):
            yield line
            continue
        if previous is not None and ts > previous:
            time.sleep((ts - previous) / speedup)
        previous = ts
        yield line


def replayFile(path, sink, posterior, policy, speedup=math.inf,
               batchSize=STREAM_BATCH, seed=None):
    """ Feed a recorded stream file to serve. Swaps are deterministic, so
    scores do not depend on speedup. """
    with open(path) as f:
        source = f if math.isinf(speedup) else _paced(f, speedup)
        return serve(source, sink, posterior, policy, batchSize,
                     deterministic=True, seed=seed,
                     countQueueWait=not math.isinf(speedup))


def serveSocket(host, port, posterior, policy, batchSize=STREAM_BATCH,
                seed=None, ready=None):
    """ Accept one local TCP connection and serve it: records are read from
    and events written to the same socket. """
    with socket.create_server((host, port)) as server:
        if ready is not None:
            ready(server.getsockname())
        logger.info("Listening on %s:%d", *server.getsockname()[:2])
        conn, address = server.accept()
        logger.info("Connection from %s", address)
        with conn, conn.makefile('r') as source, conn.makefile('w') as sink:
            return serve(source, sink, posterior, policy, batchSize, seed=seed)


def writeReplayFile(transactions, path, withLabels=True, firstId=0):
    """ One stream line per transaction with the raw 30 features; ts is the
    Time column. """
    X = buildFraudFeatures(transactions)
    with open(path, 'w') as f:
        for i, (ts, x, y) in enumerate(zip(transactions.times, X,
                                           transactions.labels)):
            doc = {'id': firstId + i, 'ts': float(ts), 'x': x.tolist()}
            if withLabels:
                doc['y'] = int(y)
            f.write(json.dumps(doc) + '\n')
    return path
