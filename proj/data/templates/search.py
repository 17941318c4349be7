def {{binary_search}}(arr, target):
    """Index of target in a sorted list, or -1."""
    left, right = 0, len(arr) - 1
    while left <= right:
        mid = (left + right) // 2
        if arr[mid] == target:
            return mid
        if arr[mid] < target:
            left = mid + 1
        else:
            right = mid - 1
    return -1


def {{merge_sorted}}(a, b):
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] <= b[j]:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out


def {{merge_sort}}(arr):
    if len(arr) <= 1:
        return arr
    mid = len(arr) // 2
    left = {{merge_sort}}(arr[:mid])
    right = {{merge_sort}}(arr[mid:])
    return {{merge_sorted}}(left, right)
