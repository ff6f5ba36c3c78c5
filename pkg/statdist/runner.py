import asyncio
from collections.abc import Callable, Sequence
from typing import Any, NamedTuple

from loguru import logger

from statdist.errors import StatdistError


class TaskError(Exception):
    """Exception for a task that failed inside the worker pool"""

    def __init__(self, label: str, error: Exception) -> None:
        self.label = label
        self.error = error
        super().__init__(f"{label}: {error}")


class Task(NamedTuple):
    label: str
    func: Callable[..., Any]
    args: tuple = ()


def _call(task: Task) -> Any:
    try:
        return task.func(*task.args)
    except (StatdistError, ValueError) as e:
        logger.error(f"Task {task.label} failed: {e}")
        raise TaskError(task.label, e) from e
    except Exception:
        logger.exception(f"Task {task.label} crashed")
        raise


async def run_task(semaphore: asyncio.Semaphore, task: Task) -> Any:
    async with semaphore:
        return await asyncio.to_thread(_call, task)


async def gather_tasks(tasks: Sequence[Task], threads: int) -> list[Any]:
    """List of tasks to a list of results using asyncio"""
    semaphore = asyncio.Semaphore(threads)
    results = await asyncio.gather(
        *(run_task(semaphore, task) for task in tasks), return_exceptions=True
    )
    return results


def run_all(tasks: Sequence[Task], threads: int = 1) -> list[Any]:
    """Run tasks on up to `threads` worker threads.

    Results come back in task order; a failed task leaves a `TaskError` in its
    slot instead of aborting the others.
    """
    if threads <= 1 or len(tasks) <= 1:
        results = []
        for task in tasks:
            try:
                results.append(_call(task))
            except TaskError as e:
                results.append(e)
        return results
    return asyncio.run(gather_tasks(tasks, threads))


def unwrap(results: Sequence[Any]) -> list[Any]:
    """Results with the first failure re-raised as its original error"""
    for result in results:
        if isinstance(result, TaskError):
            raise result.error
        if isinstance(result, BaseException):
            raise result
    return list(results)
